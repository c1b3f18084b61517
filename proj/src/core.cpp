#include "renewal/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace renewal {

namespace {

void check_lengths(const char* what, std::size_t got, std::size_t want) {
    if (got != want) {
        throw ConfigError(std::string(what) + ": expected length " +
                          std::to_string(want) + ", got " + std::to_string(got));
    }
}

} // namespace

Rectangle BoundsConfig::rectangle() const {
    validate();
    Rectangle box(x_min.size());
    for (std::size_t m = 0; m < x_min.size(); ++m) {
        // Extreme quotients of x/T over the declared envelope.  Both T
        // endpoints matter on each side because x may be negative.
        box[m].lo = std::min(x_min[m] / t_min, x_min[m] / t_max);
        box[m].hi = std::max(x_max[m] / t_min, x_max[m] / t_max);
    }
    return box;
}

void BoundsConfig::validate() const {
    if (!(t_min > 0.0) || !(t_max >= t_min)) {
        throw ConfigError("BoundsConfig: need 0 < t_min <= t_max");
    }
    check_lengths("BoundsConfig.y_max", y_max.size(), y_min.size());
    check_lengths("BoundsConfig.x_max", x_max.size(), x_min.size());
    for (std::size_t i = 0; i < y_min.size(); ++i) {
        if (y_min[i] > y_max[i]) throw ConfigError("BoundsConfig: y_min > y_max");
    }
    for (std::size_t m = 0; m < x_min.size(); ++m) {
        if (x_min[m] > x_max[m]) throw ConfigError("BoundsConfig: x_min > x_max");
    }
}

void MetricsLedger::record(const PolicyOutcome& outcome) {
    check_lengths("PolicyOutcome.penalties", outcome.penalties.size(), sum_y.size());
    check_lengths("PolicyOutcome.attributes", outcome.attributes.size(), sum_x.size());
    if (!(outcome.frame_length > 0.0)) {
        throw DomainError("MetricsLedger: frame length must be positive");
    }
    sum_t += outcome.frame_length;
    for (std::size_t i = 0; i < sum_y.size(); ++i) sum_y[i] += outcome.penalties[i];
    for (std::size_t m = 0; m < sum_x.size(); ++m) sum_x[m] += outcome.attributes[m];
    ++frames;
}

QueueBank update_z(QueueBank bank, const PolicyOutcome& outcome) {
    check_lengths("PolicyOutcome.penalties", outcome.penalties.size(), bank.z.size() + 1);
    check_lengths("ConstraintTargets", bank.targets.c.size(), bank.z.size());
    if (!(outcome.frame_length > 0.0)) {
        throw DomainError("update_z: frame length must be positive");
    }
    for (std::size_t l = 0; l < bank.z.size(); ++l) {
        const double drift = outcome.penalties[l + 1] - bank.targets.c[l] * outcome.frame_length;
        bank.z[l] = std::max(bank.z[l] + drift, 0.0);
    }
    return bank;
}

QueueBank update_g(QueueBank bank, const PolicyOutcome& outcome,
                   std::span<const double> gamma, const Rectangle* box) {
    check_lengths("gamma", gamma.size(), bank.g.size());
    check_lengths("PolicyOutcome.attributes", outcome.attributes.size(), bank.g.size());
    if (!(outcome.frame_length > 0.0)) {
        throw DomainError("update_g: frame length must be positive");
    }
    if (box != nullptr) {
        check_lengths("rectangle", box->size(), gamma.size());
        for (std::size_t m = 0; m < gamma.size(); ++m) {
            if (gamma[m] < (*box)[m].lo - 1e-12 || gamma[m] > (*box)[m].hi + 1e-12) {
                throw DomainError("update_g: auxiliary point outside its box");
            }
        }
    }
    for (std::size_t m = 0; m < bank.g.size(); ++m) {
        const double drift = outcome.frame_length * gamma[m] - outcome.attributes[m];
        bank.g[m] = std::max(bank.g[m] + drift, 0.0);
    }
    return bank;
}

double lyapunov_value(const QueueBank& bank) {
    double acc = 0.0;
    for (double z : bank.z) acc += z * z;
    for (double g : bank.g) acc += g * g;
    return 0.5 * acc;
}

double constraint_drift_envelope(const BoundsConfig& bounds, const ConstraintTargets& targets) {
    bounds.validate();
    if (bounds.y_min.size() != targets.c.size() + 1) {
        throw ConfigError("constraint_drift_envelope: bounds/targets length mismatch");
    }
    double acc = 0.0;
    for (std::size_t l = 0; l < targets.c.size(); ++l) {
        double worst = 0.0;
        for (double y : {bounds.y_min[l + 1], bounds.y_max[l + 1]}) {
            for (double t : {bounds.t_min, bounds.t_max}) {
                const double drift = y - targets.c[l] * t;
                worst = std::max(worst, drift * drift);
            }
        }
        acc += worst;
    }
    return 0.5 * acc;
}

RatioEstimates ratio_estimates(const MetricsLedger& ledger) {
    if (ledger.frames == 0) {
        throw DomainError("ratio_estimates: ledger is empty");
    }
    RatioEstimates est;
    est.objective = ledger.sum_y.empty() ? 0.0 : ledger.sum_y[0] / ledger.sum_t;
    est.constraints.resize(ledger.sum_y.size() > 0 ? ledger.sum_y.size() - 1 : 0);
    for (std::size_t l = 0; l < est.constraints.size(); ++l) {
        est.constraints[l] = ledger.sum_y[l + 1] / ledger.sum_t;
    }
    est.attributes.resize(ledger.sum_x.size());
    for (std::size_t m = 0; m < est.attributes.size(); ++m) {
        est.attributes[m] = ledger.sum_x[m] / ledger.sum_t;
    }
    return est;
}

} // namespace renewal
