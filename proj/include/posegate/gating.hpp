#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "posegate/camera.hpp"
#include "posegate/errors.hpp"
#include "posegate/pnp.hpp"
#include "posegate/se3.hpp"

namespace posegate {

enum class GatingStrategy {
    Reject,     // keep the previous target pose, drop the update entirely
    ScaleStep,  // execute a geodesically shrunk fraction of the update
};

/// Thresholds and strategy for the execution-level reliability gate.
///
/// gn_trigger fires when the final residual is excessively large OR when the
/// optimizer's relative residual decrease stalls below tau_dr while the
/// residual is still above tau_r_floor. The floor keeps a stalled-but-tiny
/// residual (the optimizer simply had nothing left to do) from counting as
/// instability.
struct GatingThresholds {
    double tau_rep = 2.0;       // px, reprojection consistency
    double tau_r = 1.5;         // px, final optimizer residual
    double tau_dr = 0.01;       // unitless, relative residual decrease
    double tau_r_floor = 0.25;  // px, guard under the delta-r criterion
    double tau_gamma = 6.0;     // unitless, proximity risk
    double alpha = 0.5;         // step-scaling factor, (0, 1]
    GatingStrategy strategy = GatingStrategy::ScaleStep;
};

inline void validate_thresholds(const GatingThresholds& th) {
    if (!(th.tau_rep > 0.0)) throw InvalidParameterError("thresholds: tau_rep must be > 0");
    if (!(th.tau_r > 0.0)) throw InvalidParameterError("thresholds: tau_r must be > 0");
    if (!(th.tau_dr > 0.0)) throw InvalidParameterError("thresholds: tau_dr must be > 0");
    if (!(th.tau_r_floor > 0.0)) throw InvalidParameterError("thresholds: tau_r_floor must be > 0");
    if (!(th.tau_gamma > 0.0)) throw InvalidParameterError("thresholds: tau_gamma must be > 0");
    if (!(th.alpha > 0.0) || !(th.alpha <= 1.0)) {
        throw InvalidParameterError("thresholds: alpha must lie in (0, 1]");
    }
}

/// Per-estimate reliability verdict. `reliable` is true exactly when no
/// criterion triggered; every threshold comparison is strict `>` on the
/// triggering side.
struct ReliabilityReport {
    double e_rep = 0.0;  // px
    double r_gn = 0.0;   // px
    std::optional<double> delta_r;  // absent for single-entry traces
    double gamma = 0.0;
    bool rep_trigger = false;
    bool gn_trigger = false;
    bool prox_trigger = false;
    bool reliable = true;
};

struct GatingDecision {
    enum class Kind { ExecuteFull, Rejected, Scaled };

    Kind kind = Kind::ExecuteFull;
    double alpha = 1.0;  // meaningful for Scaled only

    bool gated() const { return kind != Kind::ExecuteFull; }
};

/// Per-criterion trigger bookkeeping across a batch of trials.
struct TriggerStats {
    std::uint64_t rep_count = 0;
    std::uint64_t gn_count = 0;
    std::uint64_t prox_count = 0;
    std::uint64_t gated_union_count = 0;  // trials with at least one trigger
    std::uint64_t total_trials = 0;
};

/// Effective spatial scale of the target's feature points: the point-cloud
/// diameter (maximum pairwise distance), mm.
inline double effective_scale(const TargetModel& target) {
    if (target.size() < 2) {
        throw InsufficientPointsError("effective_scale: need at least 2 points");
    }
    double max_sq = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        for (std::size_t j = i + 1; j < target.size(); ++j) {
            max_sq = std::max(max_sq, (target.points[i] - target.points[j]).squaredNorm());
        }
    }
    return std::sqrt(max_sq);
}

/// Scale-based proximity risk factor: gamma = d / s.
inline double proximity_risk(double distance_mm, double scale_mm) {
    if (!(scale_mm > 0.0)) {
        throw InvalidParameterError("proximity_risk: scale must be > 0");
    }
    if (distance_mm < 0.0) {
        throw InvalidParameterError("proximity_risk: distance must be >= 0");
    }
    return distance_mm / scale_mm;
}

/// Combines reprojection consistency, optimizer stability, and proximity
/// risk into the binary reliability verdict. A single-entry trace (closed
/// form estimator) carries no delta-r, so that criterion is skipped.
inline ReliabilityReport evaluate(double e_rep, const ResidualTrace& trace, double gamma,
                                  const GatingThresholds& th) {
    if (trace.size() == 0) {
        throw InvalidInputError("evaluate: empty residual trace");
    }
    ReliabilityReport report;
    report.e_rep = e_rep;
    report.r_gn = trace.final_residual();
    report.gamma = gamma;
    if (trace.size() >= 2) {
        report.delta_r = residual_decrease(trace);
    }
    report.rep_trigger = e_rep > th.tau_rep;
    report.prox_trigger = gamma > th.tau_gamma;
    report.gn_trigger = (report.r_gn > th.tau_r) ||
                        (report.delta_r.has_value() && *report.delta_r < th.tau_dr &&
                         report.r_gn > th.tau_r_floor);
    report.reliable = !(report.rep_trigger || report.gn_trigger || report.prox_trigger);
    return report;
}

/// Applies the execution-level gating strategy:
///  - reliable            -> new_target unchanged
///  - unreliable, Reject  -> previous target (update dropped)
///  - unreliable, Scale   -> prev_executed advanced by alpha of the update
inline std::pair<Pose, GatingDecision> gate(const ReliabilityReport& report,
                                            const Pose& prev_executed, const Pose& prev_target,
                                            const Pose& new_target, const GatingThresholds& th) {
    if (report.reliable) {
        return {new_target, GatingDecision{GatingDecision::Kind::ExecuteFull, 1.0}};
    }
    if (th.strategy == GatingStrategy::Reject) {
        return {prev_target, GatingDecision{GatingDecision::Kind::Rejected, 0.0}};
    }
    const PoseDelta update = pose_diff(new_target, prev_executed);
    const PoseDelta scaled = scale_delta(update, th.alpha);
    return {apply_delta(prev_executed, scaled),
            GatingDecision{GatingDecision::Kind::Scaled, th.alpha}};
}

inline TriggerStats accumulate(TriggerStats stats, const ReliabilityReport& report) {
    ++stats.total_trials;
    if (report.rep_trigger) ++stats.rep_count;
    if (report.gn_trigger) ++stats.gn_count;
    if (report.prox_trigger) ++stats.prox_count;
    if (report.rep_trigger || report.gn_trigger || report.prox_trigger) {
        ++stats.gated_union_count;
    }
    return stats;
}

/// Field-wise sum; exact because every counter is additive.
inline TriggerStats merge(const TriggerStats& a, const TriggerStats& b) {
    return TriggerStats{a.rep_count + b.rep_count, a.gn_count + b.gn_count,
                        a.prox_count + b.prox_count, a.gated_union_count + b.gated_union_count,
                        a.total_trials + b.total_trials};
}

}  // namespace posegate
