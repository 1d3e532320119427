#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "posegate/camera.hpp"
#include "posegate/gating.hpp"
#include "posegate/pnp.hpp"
#include "posegate/rng.hpp"
#include "posegate/se3.hpp"

namespace posegate {

enum class GatingMode { Off, On };

/// What the trial asks the robot to reach.
///
/// HoldObserved (default): the goal is the true camera-from-target
/// configuration at observation time, so a perfect estimate commands zero
/// motion and every executed deviation is estimation error amplified through
/// the transform chain. This isolates the amplification mechanism and keeps
/// scaled/rejected executions comparable to full ones.
///
/// Standoff: the goal is a fixed camera-from-target pose (identity rotation,
/// goal_standoff_mm along +z). Commands then include a large approach motion;
/// gating a trial under this policy withholds genuinely needed motion, which
/// dominates the error metric.
enum class GoalPolicy { HoldObserved, Standoff };

/// Which camera-target distance feeds gamma: the simulator's ground truth
/// (default) or the norm of the estimated translation, as a deployed system
/// would use.
enum class GammaDistance { True, Estimated };

struct SimOptions {
    GoalPolicy goal_policy = GoalPolicy::HoldObserved;
    double goal_standoff_mm = 150.0;
    GammaDistance gamma_distance = GammaDistance::True;
};

/// One point of the experimental grid plus the shared sampling knobs.
struct Scenario {
    double depth_mm = 500.0;
    double off_axis_mm = 0.0;
    double orientation_bound_deg = 20.0;  // per-axis uniform bound
    double pixel_sigma_px = 1.0;
    double handeye_perturb_deg = 0.0;  // systematic hand-eye error channel
    double handeye_perturb_mm = 0.0;
    double success_pos_threshold_mm = 5.0;
    double success_ori_threshold_deg = 5.0;
};

inline void validate_scenario(const Scenario& s) {
    if (!(s.depth_mm > 0.0)) throw InvalidParameterError("scenario: depth_mm must be > 0");
    if (s.off_axis_mm < 0.0) throw InvalidParameterError("scenario: off_axis_mm must be >= 0");
    if (s.orientation_bound_deg < 0.0) {
        throw InvalidParameterError("scenario: orientation_bound_deg must be >= 0");
    }
    if (s.pixel_sigma_px < 0.0) throw InvalidParameterError("scenario: pixel_sigma_px must be >= 0");
    if (!(s.success_pos_threshold_mm > 0.0)) {
        throw InvalidParameterError("scenario: success_pos_threshold_mm must be > 0");
    }
    if (!(s.success_ori_threshold_deg > 0.0)) {
        throw InvalidParameterError("scenario: success_ori_threshold_deg must be > 0");
    }
}

/// Frames of the alignment task: robot base {B}, end-effector {E},
/// camera {C}, target {T}.
struct FrameChain {
    Pose base_from_ee;      // initial end-effector pose in {B}
    Pose ee_from_cam;       // hand-eye transform (true)
    Pose base_from_target;  // true, stationary
    Pose goal;              // desired camera-from-target configuration
};

/// Fixed canonical initial end-effector pose: identity rotation, 500 mm up.
inline Pose canonical_base_from_ee() {
    return Pose{Rotation::identity(), Eigen::Vector3d(0.0, 0.0, 500.0)};
}

/// Fixed canonical hand-eye transform: 90 deg wrist rotation about z with a
/// 50 mm z offset. Any fixed nontrivial transform works; this one is
/// recorded in every output file.
inline Pose canonical_ee_from_cam() {
    return Pose{Rotation::about_z(0.5 * kPi), Eigen::Vector3d(0.0, 0.0, 50.0)};
}

/// Target orientation sampling: one uniform angle in [-bound, bound] per
/// axis, composed as Rz(az) * Ry(ay) * Rx(ax). Draw order: ax, ay, az.
inline Rotation sample_bounded_rotation(double bound_deg, Rng& rng) {
    const double b = bound_deg * kRadPerDeg;
    const double ax = rng.uniform(-b, b);
    const double ay = rng.uniform(-b, b);
    const double az = rng.uniform(-b, b);
    return Rotation::about_z(az) * Rotation::about_y(ay) * Rotation::about_x(ax);
}

inline Pose true_cam_from_target(const FrameChain& chain) {
    return compose(inverse(compose(chain.base_from_ee, chain.ee_from_cam)),
                   chain.base_from_target);
}

/// Places the target at the scenario's depth along the initial camera's
/// optical axis, laterally displaced by off_axis_mm in a uniformly sampled
/// image-plane direction, with per-axis bounded random orientation.
/// Draw order: lateral direction angle, then the three orientation angles.
inline FrameChain build_chain(const Scenario& s, const TargetModel& target, Rng& rng,
                              const SimOptions& options = {}) {
    validate_scenario(s);
    const double phi = rng.uniform(0.0, 2.0 * kPi);
    const Rotation orientation = sample_bounded_rotation(s.orientation_bound_deg, rng);
    const Pose cam_from_target{
        orientation,
        Eigen::Vector3d(s.off_axis_mm * std::cos(phi), s.off_axis_mm * std::sin(phi), s.depth_mm)};

    FrameChain chain;
    chain.base_from_ee = canonical_base_from_ee();
    chain.ee_from_cam = canonical_ee_from_cam();
    chain.base_from_target =
        compose(compose(chain.base_from_ee, chain.ee_from_cam), cam_from_target);
    chain.goal = (options.goal_policy == GoalPolicy::HoldObserved)
                     ? cam_from_target
                     : Pose{Rotation::identity(), Eigen::Vector3d(0.0, 0.0, options.goal_standoff_mm)};

    for (std::size_t i = 0; i < target.size(); ++i) {
        const double z = transform_point(cam_from_target, target.points[i]).z();
        if (!(z > kMinDepthMm)) {
            throw ScenarioInfeasibleError("scenario places target point " + std::to_string(i) +
                                          " behind the camera (z = " + std::to_string(z) + " mm)");
        }
    }
    return chain;
}

/// Simulated image capture: projects the target under the true
/// camera-from-target pose and adds pixel noise.
inline Correspondences observe(const FrameChain& chain, const TargetModel& target,
                               const Intrinsics& k, double sigma_px, Rng& rng) {
    const PixelObservations pixels =
        add_pixel_noise(project(k, true_cam_from_target(chain), target), sigma_px, rng);
    return Correspondences{target, pixels, k};
}

/// Desired end-effector pose from an estimated target pose:
///   B_T_C  = base_from_ee * ee_from_cam
///   B_T_T  = B_T_C * est_cam_from_target
///   B_T_C* = B_T_T * goal^-1
///   B_T_E* = B_T_C* * ee_from_cam^-1
/// If the estimate equals the true camera-from-target pose, executing the
/// result makes the achieved camera-from-target pose equal the goal.
inline Pose desired_ee_pose(const Pose& base_from_ee, const Pose& ee_from_cam,
                            const Pose& est_cam_from_target, const Pose& goal) {
    const Pose base_from_cam = compose(base_from_ee, ee_from_cam);
    const Pose base_from_target = compose(base_from_cam, est_cam_from_target);
    const Pose desired_base_from_cam = compose(base_from_target, inverse(goal));
    return compose(desired_base_from_cam, inverse(ee_from_cam));
}

struct TrialOutcome {
    int scenario_id = 0;
    int repeat_id = 0;
    GatingMode mode = GatingMode::Off;
    double depth_mm = 0.0;
    double off_axis_mm = 0.0;
    std::uint64_t seed = 0;
    double pos_err_mm = 0.0;
    double ori_err_deg = 0.0;
    bool success = false;
    GatingDecision decision;
    ReliabilityReport report;
};

/// Full per-trial state for inspection (single-trial traces).
struct TrialTrace {
    FrameChain chain;
    Correspondences correspondences;
    Pose true_cam_from_target;
    bool estimator_failed = false;
    PnPEstimate estimate;
    Pose new_target;  // commanded end-effector pose before gating
    Pose executed;
    Pose oracle;  // desired end-effector pose from the true target pose
    TrialOutcome outcome;
};

/// One single-step alignment trial:
/// build chain -> observe -> estimate -> score reliability -> gate (when
/// enabled) -> execute with exact motion -> score against the oracle
/// desired pose derived from the true camera-from-target pose.
///
/// Estimator failures (including estimates that throw during reprojection)
/// become sentinel outcomes with infinite errors; they never abort a sweep.
inline TrialTrace run_trial_traced(const Scenario& s, const PoseEstimator& estimator,
                                   const GatingThresholds& thresholds, bool gating_enabled,
                                   const TargetModel& target, const Intrinsics& k, Rng& rng,
                                   const SimOptions& options = {}) {
    TrialTrace trace;
    trace.chain = build_chain(s, target, rng, options);
    trace.correspondences = observe(trace.chain, target, k, s.pixel_sigma_px, rng);

    // Hand-eye transform used by the controller; optionally perturbed to
    // model calibration error. Draw order: rotation axis (3 gaussians),
    // translation direction (3 gaussians).
    Pose ee_from_cam_used = trace.chain.ee_from_cam;
    if (s.handeye_perturb_deg != 0.0 || s.handeye_perturb_mm != 0.0) {
        Eigen::Vector3d axis(rng.gaussian(), rng.gaussian(), rng.gaussian());
        Eigen::Vector3d dir(rng.gaussian(), rng.gaussian(), rng.gaussian());
        if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitX();
        if (dir.norm() < 1e-12) dir = Eigen::Vector3d::UnitX();
        const PoseDelta perturb{axis.normalized() * (s.handeye_perturb_deg * kRadPerDeg),
                                dir.normalized() * s.handeye_perturb_mm};
        ee_from_cam_used = apply_delta(trace.chain.ee_from_cam, perturb);
    }

    trace.true_cam_from_target = true_cam_from_target(trace.chain);
    const Pose& truth = trace.true_cam_from_target;

    TrialOutcome& outcome = trace.outcome;
    outcome.depth_mm = s.depth_mm;
    outcome.off_axis_mm = s.off_axis_mm;
    outcome.mode = gating_enabled ? GatingMode::On : GatingMode::Off;

    const double scale = effective_scale(target);
    double e_rep = 0.0;
    try {
        trace.estimate = estimator.estimate(trace.correspondences);
        e_rep = reprojection_error(trace.correspondences.pixels,
                                   project(k, trace.estimate.cam_from_target, target));
    } catch (const std::runtime_error&) {
        trace.estimator_failed = true;
    }

    if (trace.estimator_failed) {
        const double inf = std::numeric_limits<double>::infinity();
        outcome.report = evaluate(inf, ResidualTrace{{inf}},
                                  proximity_risk(truth.translation.norm(), scale), thresholds);
        outcome.decision = gating_enabled
                               ? GatingDecision{GatingDecision::Kind::Rejected, 0.0}
                               : GatingDecision{GatingDecision::Kind::ExecuteFull, 1.0};
        outcome.pos_err_mm = inf;
        outcome.ori_err_deg = inf;
        outcome.success = false;
        return trace;
    }

    const double distance = (options.gamma_distance == GammaDistance::True)
                                ? truth.translation.norm()
                                : trace.estimate.cam_from_target.translation.norm();
    const double gamma = proximity_risk(distance, scale);
    outcome.report = evaluate(e_rep, trace.estimate.trace, gamma, thresholds);

    trace.new_target = desired_ee_pose(trace.chain.base_from_ee, ee_from_cam_used,
                                       trace.estimate.cam_from_target, trace.chain.goal);

    // Single-step task: both the previously executed pose and the previous
    // target equal the initial end-effector pose.
    trace.executed = trace.new_target;
    if (gating_enabled) {
        std::tie(trace.executed, outcome.decision) =
            gate(outcome.report, trace.chain.base_from_ee, trace.chain.base_from_ee,
                 trace.new_target, thresholds);
    } else {
        outcome.decision = GatingDecision{GatingDecision::Kind::ExecuteFull, 1.0};
    }

    trace.oracle =
        desired_ee_pose(trace.chain.base_from_ee, trace.chain.ee_from_cam, truth, trace.chain.goal);
    outcome.pos_err_mm = (trace.executed.translation - trace.oracle.translation).norm();
    outcome.ori_err_deg = rotation_angle_deg(trace.executed.rotation, trace.oracle.rotation);
    outcome.success = outcome.pos_err_mm <= s.success_pos_threshold_mm &&
                      outcome.ori_err_deg <= s.success_ori_threshold_deg;
    return trace;
}

inline TrialOutcome run_trial(const Scenario& s, const PoseEstimator& estimator,
                              const GatingThresholds& thresholds, bool gating_enabled,
                              const TargetModel& target, const Intrinsics& k, Rng& rng,
                              const SimOptions& options = {}) {
    return run_trial_traced(s, estimator, thresholds, gating_enabled, target, k, rng, options)
        .outcome;
}

struct SweepGrid {
    std::vector<Scenario> scenarios;
    int repeats = 20;
    std::uint64_t base_seed = 0;
    std::vector<GatingMode> modes = {GatingMode::Off, GatingMode::On};
};

/// Runs the full grid. The trial seed depends only on (base_seed,
/// scenario_index, repeat_index), so gated and ungated modes consume
/// identical scenes and noise (paired design). Results are ordered by
/// (scenario_index, repeat_index, mode) with Off before On.
inline std::vector<TrialOutcome> run_sweep(const SweepGrid& grid, const PoseEstimator& estimator,
                                           const GatingThresholds& thresholds,
                                           const TargetModel& target, const Intrinsics& k,
                                           const SimOptions& options = {}) {
    if (grid.repeats < 1) {
        throw InvalidParameterError("run_sweep: repeats must be >= 1");
    }
    std::vector<GatingMode> modes = grid.modes;
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
    if (modes.empty()) {
        throw InvalidParameterError("run_sweep: at least one gating mode required");
    }

    std::vector<TrialOutcome> outcomes;
    outcomes.reserve(grid.scenarios.size() * static_cast<std::size_t>(grid.repeats) * modes.size());
    for (std::size_t sid = 0; sid < grid.scenarios.size(); ++sid) {
        for (int rid = 0; rid < grid.repeats; ++rid) {
            const std::uint64_t seed = mix_seed(grid.base_seed, sid, static_cast<std::uint64_t>(rid));
            for (GatingMode mode : modes) {
                Rng rng(seed);
                TrialOutcome outcome = run_trial(grid.scenarios[sid], estimator, thresholds,
                                                 mode == GatingMode::On, target, k, rng, options);
                outcome.scenario_id = static_cast<int>(sid);
                outcome.repeat_id = rid;
                outcome.seed = seed;
                outcomes.push_back(std::move(outcome));
            }
        }
    }
    return outcomes;
}

}  // namespace posegate
