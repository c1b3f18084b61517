#include "renewal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "renewal/ratio_solver.hpp"

namespace renewal {

namespace {

constexpr std::size_t kMaxPoints = 16;       // oracle is for small reference systems
constexpr int kVertexConstraintLimit = 3;    // beyond this, use the mixture grid
constexpr double kFeasTol = 1e-9;

// Gaussian elimination with partial pivoting; returns false on a (near-)
// singular system.  a is row-major n x n, x receives the solution of ax = b.
bool solve_square(std::vector<double> a, std::vector<double> b, std::size_t n,
                  std::vector<double>& x) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::fabs(a[row * n + col]) > std::fabs(a[pivot * n + col])) pivot = row;
        }
        if (std::fabs(a[pivot * n + col]) < 1e-12) return false;
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a[row * n + col] / a[col * n + col];
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a[row * n + j] -= factor * a[col * n + j];
            b[row] -= factor * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t j = row + 1; j < n; ++j) acc -= a[row * n + j] * x[j];
        x[row] = acc / a[row * n + row];
    }
    return true;
}

struct Tableau {
    std::size_t n = 0; // pure policies
    std::size_t l = 0; // constraints
    std::vector<double> w; // w[l*n + i] = y_{l,i} − c_l·t_i
};

Tableau drift_tableau(const FinitePolicySystem& system) {
    Tableau tab;
    tab.n = system.points.size();
    tab.l = system.targets.c.size();
    tab.w.resize(tab.n * tab.l);
    for (std::size_t l = 0; l < tab.l; ++l) {
        for (std::size_t i = 0; i < tab.n; ++i) {
            tab.w[l * tab.n + i] =
                system.points[i].y[l + 1] - system.targets.c[l] * system.points[i].t;
        }
    }
    return tab;
}

bool mixture_feasible(const Tableau& tab, std::span<const double> p) {
    for (std::size_t l = 0; l < tab.l; ++l) {
        double acc = 0.0;
        double mag = 1.0;
        for (std::size_t i = 0; i < tab.n; ++i) {
            acc += tab.w[l * tab.n + i] * p[i];
            mag += std::fabs(tab.w[l * tab.n + i]);
        }
        if (acc > kFeasTol * mag) return false;
    }
    return true;
}

// Enumerate subsets of {0..count-1} of the given size into `subset`, calling
// visit for each.  Sizes stay tiny (count <= 16), recursion is fine.
void for_each_subset(std::size_t count, std::size_t size, std::vector<std::size_t>& subset,
                     std::size_t from, const std::function<void()>& visit) {
    if (subset.size() == size) {
        visit();
        return;
    }
    for (std::size_t i = from; i + (size - subset.size()) <= count; ++i) {
        subset.push_back(i);
        for_each_subset(count, size, subset, i + 1, visit);
        subset.pop_back();
    }
}

// Dense grid over the mixture simplex: all compositions of `grid` among n
// coordinates, p = counts / grid.
void for_each_mixture(std::size_t n, int grid, const std::function<void(std::span<const double>)>& visit) {
    std::vector<int> counts(n, 0);
    std::vector<double> p(n, 0.0);
    const std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int remaining) {
        if (idx + 1 == n) {
            counts[idx] = remaining;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = static_cast<double>(counts[i]) / static_cast<double>(grid);
            }
            visit(p);
            return;
        }
        for (int take = 0; take <= remaining; ++take) {
            counts[idx] = take;
            rec(idx + 1, remaining - take);
        }
    };
    rec(0, grid);
}

double dot_y0(const FinitePolicySystem& system, std::span<const double> p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += system.points[i].y[0] * p[i];
    return acc;
}

double dot_t(const FinitePolicySystem& system, std::span<const double> p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += system.points[i].t * p[i];
    return acc;
}

void check_grid(int grid) {
    if (grid < 1) throw ConfigError("oracle: grid resolution must be >= 1");
}

// Grid search shared by the three oracles: minimize `objective` over feasible
// grid mixtures.
OracleResult grid_optimum(const FinitePolicySystem& system, int grid,
                          const std::function<double(std::span<const double>)>& objective) {
    const Tableau tab = drift_tableau(system);
    OracleResult out;
    double best = std::numeric_limits<double>::infinity();
    for_each_mixture(system.points.size(), grid, [&](std::span<const double> p) {
        if (!mixture_feasible(tab, p)) return;
        out.feasible = true;
        best = std::min(best, objective(p));
    });
    if (out.feasible) out.value = best;
    return out;
}

} // namespace

void FinitePolicySystem::validate() const {
    if (points.empty()) throw ConfigError("FinitePolicySystem: need at least one pure policy");
    if (points.size() > kMaxPoints) {
        throw ConfigError("FinitePolicySystem: reference oracle supports at most 16 policies");
    }
    const std::size_t ny = points.front().y.size();
    const std::size_t nx = points.front().x.size();
    if (ny != targets.c.size() + 1) {
        throw ConfigError("FinitePolicySystem: penalty tuple length must be targets + 1");
    }
    for (const PurePolicy& p : points) {
        if (p.y.size() != ny || p.x.size() != nx) {
            throw ConfigError("FinitePolicySystem: ragged pure-policy tuples");
        }
        if (!(p.t > 0.0)) throw ConfigError("FinitePolicySystem: frame lengths must be positive");
    }
}

std::vector<std::vector<double>> feasible_vertices(const FinitePolicySystem& system) {
    system.validate();
    const Tableau tab = drift_tableau(system);
    const std::size_t n = tab.n;
    std::vector<std::vector<double>> vertices;

    // A vertex has support size k with k-1 of the drift constraints tight
    // (the simplex equation supplies the remaining row).
    std::vector<std::size_t> support, active;
    std::vector<double> matrix, rhs, solution, candidate(n);
    const std::size_t max_support = std::min(n, tab.l + 1);
    for (std::size_t k = 1; k <= max_support; ++k) {
        for_each_subset(n, k, support, 0, [&]() {
            active.clear();
            for_each_subset(tab.l, k - 1, active, 0, [&]() {
                matrix.assign(k * k, 0.0);
                rhs.assign(k, 0.0);
                for (std::size_t j = 0; j < k; ++j) matrix[j] = 1.0; // Σ p = 1
                rhs[0] = 1.0;
                for (std::size_t row = 1; row < k; ++row) {
                    for (std::size_t j = 0; j < k; ++j) {
                        matrix[row * k + j] = tab.w[active[row - 1] * n + support[j]];
                    }
                }
                if (!solve_square(matrix, rhs, k, solution)) return;
                std::fill(candidate.begin(), candidate.end(), 0.0);
                double total = 0.0;
                for (std::size_t j = 0; j < k; ++j) {
                    if (solution[j] < -1e-9) return; // outside the simplex
                    const double clipped = std::max(solution[j], 0.0);
                    candidate[support[j]] = clipped;
                    total += clipped;
                }
                if (std::fabs(total - 1.0) > 1e-9) return;
                for (double& v : candidate) v /= total;
                if (!mixture_feasible(tab, candidate)) return;
                for (const auto& seen : vertices) {
                    double dist = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        dist = std::max(dist, std::fabs(seen[i] - candidate[i]));
                    }
                    if (dist < 1e-9) return; // duplicate
                }
                vertices.push_back(candidate);
            });
        });
    }
    return vertices;
}

OracleResult oracle_ratio_opt(const FinitePolicySystem& system, int grid) {
    system.validate();
    check_grid(grid);
    if (system.targets.c.size() > kVertexConstraintLimit) {
        return grid_optimum(system, grid, [&](std::span<const double> p) {
            return dot_y0(system, p) / dot_t(system, p);
        });
    }
    const std::vector<std::vector<double>> vertices = feasible_vertices(system);
    if (vertices.empty()) return {};

    // Parametric form over the vertex list: the inner minimization of a
    // linear function over the polytope is exact on vertices.
    std::vector<std::pair<double, double>> numden;
    numden.reserve(vertices.size());
    for (const auto& p : vertices) numden.emplace_back(dot_y0(system, p), dot_t(system, p));

    FractionalInstance instance;
    instance.b_min = std::numeric_limits<double>::infinity();
    instance.b_max = 0.0;
    for (const auto& [num, den] : numden) {
        instance.b_min = std::min(instance.b_min, den);
        instance.b_max = std::max(instance.b_max, den);
    }
    instance.evaluate_inf = [&numden](double theta) {
        ActionChoice best{std::numeric_limits<double>::infinity(), -1};
        for (std::size_t i = 0; i < numden.size(); ++i) {
            const double value = numden[i].first - theta * numden[i].second;
            if (value < best.value) best = ActionChoice{value, static_cast<int>(i)};
        }
        return best;
    };

    BisectionConfig config;
    config.tolerance = 1e-9;
    config.max_iterations = 512;
    config.theta_lo = std::numeric_limits<double>::infinity();
    config.theta_hi = -std::numeric_limits<double>::infinity();
    for (const auto& [num, den] : numden) {
        config.theta_lo = std::min(config.theta_lo, num / den);
        config.theta_hi = std::max(config.theta_hi, num / den);
    }
    config.theta_lo -= 1.0;
    config.theta_hi += 1.0;
    return {true, bisect(instance, config).theta_star};
}

OracleResult oracle_y0_opt(const FinitePolicySystem& system, int grid) {
    system.validate();
    check_grid(grid);
    if (system.targets.c.size() > kVertexConstraintLimit) {
        return grid_optimum(system, grid,
                            [&](std::span<const double> p) { return dot_y0(system, p); });
    }
    const std::vector<std::vector<double>> vertices = feasible_vertices(system);
    if (vertices.empty()) return {};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : vertices) best = std::min(best, dot_y0(system, p));
    return {true, best};
}

OracleResult oracle_util_opt(const FinitePolicySystem& system, const UtilityFunction& util,
                             int grid) {
    system.validate();
    check_grid(grid);
    if (!util.evaluate) throw ConfigError("oracle_util_opt: utility has no evaluator");
    const std::size_t m = system.points.front().x.size();
    if (m == 0) throw CapabilityError("oracle_util_opt: system has no attribute processes");
    std::vector<double> ratio(m);
    // Maximize by minimizing the negated utility of the mixture's
    // attribute-per-unit-time vector.
    const OracleResult negated =
        grid_optimum(system, grid, [&](std::span<const double> p) {
            const double t = dot_t(system, p);
            for (std::size_t j = 0; j < m; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < p.size(); ++i) acc += system.points[i].x[j] * p[i];
                ratio[j] = acc / t;
            }
            return -util(ratio);
        });
    return {negated.feasible, -negated.value};
}

} // namespace renewal
