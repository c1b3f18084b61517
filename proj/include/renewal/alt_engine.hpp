#pragma once

#include <cstdint>

#include "renewal/scenario.hpp"

namespace renewal {

/**
 * Running objective-per-unit-time estimate θ[r] = Σy_0 / ΣT used by the
 * time-average variant.  θ[0] = 0 by definition.  `decay` optionally applies
 * exponential forgetting to both sums (1.0 = plain running average).
 */
struct ThetaTracker {
    double sum_y0 = 0.0;
    double sum_t = 0.0;
    double theta = 0.0;
    std::uint64_t frames = 0;
    double decay = 1.0;
};

/// Fold one completed frame into the tracker (pure; returns the new state).
ThetaTracker update_theta(ThetaTracker tracker, const PolicyOutcome& outcome);

/// Per-frame rule of the expectation-form variant: minimize
///   v·y_0 + Σ z_l·(y_l − c_l·T)
/// over the observation's actions — no root search, the queue targets act as
/// a fixed frame-length credit Σ z_l·c_l.
ActionChoice alt_form_select(const Scenario& scenario, std::span<const double> eta,
                             std::span<const double> z, double v);

/// Per-frame rule of the time-average variant: minimize
///   v·(y_0 − θ·T) + Σ z_l·(y_l − c_l·T)
/// with θ the tracker value carried in from previous frames.
ActionChoice alt_timeavg_select(const Scenario& scenario, std::span<const double> eta,
                                std::span<const double> z, double v, double theta);

struct AltConfig {
    double v = 0.0;
    std::uint64_t frames = 1;
    std::uint64_t seed = 0;
    double theta_decay = 1.0; // exponential forgetting for the tracker (1 = off)
};

/**
 * Engine for both alternative formulations.  Neither needs bisection; the
 * time-average mode additionally carries the θ tracker, updated after every
 * frame from realized outcomes.
 */
class AltEngine {
  public:
    enum class Mode { Form, TimeAverage };

    AltEngine(const Scenario& scenario, const AltConfig& config, Mode mode);

    FrameResult step();

    const QueueBank& queues() const { return bank_; }
    const MetricsLedger& ledger() const { return ledger_; }
    const ThetaTracker& tracker() const { return tracker_; }
    std::uint64_t frame() const { return frame_; }

  private:
    const Scenario& scenario_;
    AltConfig config_;
    Mode mode_;
    QueueBank bank_;
    MetricsLedger ledger_;
    ThetaTracker tracker_;
    Rng rng_;
    std::vector<double> eta_;
    std::uint64_t frame_ = 0;
};

} // namespace renewal
