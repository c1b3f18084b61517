#pragma once

#include <cstdint>
#include <random>

namespace renewal {

/**
 * Deterministic random stream.
 *
 * Wraps mt19937_64 but maps to doubles by hand ((x >> 11) * 2^-53) so a given
 * seed yields the same draw sequence on every platform and standard library.
 * One stream per replication; derive per-replication seeds with derive_seed
 * so sweep workers never share or overlap streams.
 */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform draw in [0, 1).
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer; mixes (base seed, stream index) into an independent
/// 64-bit seed.  Statistically decorrelated even for index = 0, 1, 2, ...
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t x = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

} // namespace renewal
