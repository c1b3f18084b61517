#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace renewal {

struct VerifyOptions {
    bool full = false;            // larger frame counts and sample sizes
    std::uint64_t seed = 727271u; // base seed for the generated cases
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/**
 * Structural self-checks at reduced scale: queue laws and deterministic
 * backlog bounds on the task network, root-solver properties on generated
 * fractional instances, auxiliary-maximizer optimality, concavity
 * interchange, reference-oracle agreement, engine-vs-oracle envelopes, and
 * bit-exact replay.  Each check reports pass/fail with a one-line detail;
 * nothing throws for a mere failure.
 */
std::vector<CheckResult> run_verification(const VerifyOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace renewal
