#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "posegate/camera.hpp"
#include "posegate/errors.hpp"
#include "posegate/gating.hpp"
#include "posegate/pnp.hpp"
#include "posegate/records.hpp"
#include "posegate/simulator.hpp"

namespace posegate {

/// Everything a sweep needs, loadable from a single JSON file. The file
/// embeds verbatim into the record provenance header.
struct RunConfig {
    std::vector<double> depths_mm{200.0, 400.0, 600.0, 800.0, 1000.0};
    std::vector<double> off_axes_mm{0.0, 50.0, 100.0};
    double orientation_bound_deg = 20.0;
    int repeats = 20;
    double pixel_sigma_px = 1.0;
    double handeye_perturb_deg = 0.0;
    double handeye_perturb_mm = 0.0;
    double success_pos_threshold_mm = 5.0;
    double success_ori_threshold_deg = 5.0;
    std::string estimator = "epnp_gn";  // or "epnp" (closed form, single-entry trace)
    int refine_max_iter = 50;
    double refine_tol_px = 1e-8;
    std::string gamma_distance = "true";  // or "estimated"
    std::string goal_policy = "hold";     // or "standoff"
    double goal_standoff_mm = 150.0;
    std::string target = "box";  // builtin name or a target-model file path
    std::uint64_t base_seed = 20260810;
    Intrinsics intrinsics;
    GatingThresholds thresholds;
};

inline std::string strategy_name(GatingStrategy s) {
    return s == GatingStrategy::Reject ? "reject" : "scale_step";
}

inline GatingStrategy strategy_from_name(const std::string& s) {
    if (s == "reject") return GatingStrategy::Reject;
    if (s == "scale_step") return GatingStrategy::ScaleStep;
    throw InvalidParameterError("thresholds.strategy: unknown strategy '" + s + "'");
}

inline RunConfig default_config() { return RunConfig{}; }

inline ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["depths_mm"] = c.depths_mm;
    j["off_axes_mm"] = c.off_axes_mm;
    j["orientation_bound_deg"] = c.orientation_bound_deg;
    j["repeats"] = c.repeats;
    j["pixel_sigma_px"] = c.pixel_sigma_px;
    j["handeye_perturb_deg"] = c.handeye_perturb_deg;
    j["handeye_perturb_mm"] = c.handeye_perturb_mm;
    j["success_pos_threshold_mm"] = c.success_pos_threshold_mm;
    j["success_ori_threshold_deg"] = c.success_ori_threshold_deg;
    j["estimator"] = c.estimator;
    j["refine_max_iter"] = c.refine_max_iter;
    j["refine_tol_px"] = c.refine_tol_px;
    j["gamma_distance"] = c.gamma_distance;
    j["goal_policy"] = c.goal_policy;
    j["goal_standoff_mm"] = c.goal_standoff_mm;
    j["target"] = c.target;
    j["base_seed"] = c.base_seed;
    j["intrinsics"] = {{"fx_px", c.intrinsics.fx},
                       {"fy_px", c.intrinsics.fy},
                       {"cx_px", c.intrinsics.cx},
                       {"cy_px", c.intrinsics.cy}};
    j["thresholds"] = {{"tau_rep_px", c.thresholds.tau_rep},
                       {"tau_r_px", c.thresholds.tau_r},
                       {"tau_dr", c.thresholds.tau_dr},
                       {"tau_r_floor_px", c.thresholds.tau_r_floor},
                       {"tau_gamma", c.thresholds.tau_gamma},
                       {"alpha", c.thresholds.alpha},
                       {"strategy", strategy_name(c.thresholds.strategy)}};
    return j;
}

namespace detail {

template <typename T>
T field(const nlohmann::json& j, const std::string& name, const T& fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidParameterError("config field '" + name + "' has the wrong type");
    }
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                                const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw InvalidParameterError("unknown config field '" + scope + key + "'");
        }
    }
}

}  // namespace detail

/// Parses and validates a config; diagnostics name the offending field.
inline RunConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw InvalidParameterError("config root must be a JSON object");
    }
    detail::reject_unknown_keys(
        j,
        {"depths_mm", "off_axes_mm", "orientation_bound_deg", "repeats", "pixel_sigma_px",
         "handeye_perturb_deg", "handeye_perturb_mm", "success_pos_threshold_mm",
         "success_ori_threshold_deg", "estimator", "refine_max_iter", "refine_tol_px",
         "gamma_distance", "goal_policy", "goal_standoff_mm", "target", "base_seed", "intrinsics",
         "thresholds"},
        "");

    RunConfig c;
    c.depths_mm = detail::field(j, "depths_mm", c.depths_mm);
    c.off_axes_mm = detail::field(j, "off_axes_mm", c.off_axes_mm);
    c.orientation_bound_deg = detail::field(j, "orientation_bound_deg", c.orientation_bound_deg);
    c.repeats = detail::field(j, "repeats", c.repeats);
    c.pixel_sigma_px = detail::field(j, "pixel_sigma_px", c.pixel_sigma_px);
    c.handeye_perturb_deg = detail::field(j, "handeye_perturb_deg", c.handeye_perturb_deg);
    c.handeye_perturb_mm = detail::field(j, "handeye_perturb_mm", c.handeye_perturb_mm);
    c.success_pos_threshold_mm =
        detail::field(j, "success_pos_threshold_mm", c.success_pos_threshold_mm);
    c.success_ori_threshold_deg =
        detail::field(j, "success_ori_threshold_deg", c.success_ori_threshold_deg);
    c.estimator = detail::field(j, "estimator", c.estimator);
    c.refine_max_iter = detail::field(j, "refine_max_iter", c.refine_max_iter);
    c.refine_tol_px = detail::field(j, "refine_tol_px", c.refine_tol_px);
    c.gamma_distance = detail::field(j, "gamma_distance", c.gamma_distance);
    c.goal_policy = detail::field(j, "goal_policy", c.goal_policy);
    c.goal_standoff_mm = detail::field(j, "goal_standoff_mm", c.goal_standoff_mm);
    c.target = detail::field(j, "target", c.target);
    c.base_seed = detail::field(j, "base_seed", c.base_seed);

    if (j.contains("intrinsics")) {
        const auto& k = j.at("intrinsics");
        detail::reject_unknown_keys(k, {"fx_px", "fy_px", "cx_px", "cy_px"}, "intrinsics.");
        c.intrinsics.fx = detail::field(k, "fx_px", c.intrinsics.fx);
        c.intrinsics.fy = detail::field(k, "fy_px", c.intrinsics.fy);
        c.intrinsics.cx = detail::field(k, "cx_px", c.intrinsics.cx);
        c.intrinsics.cy = detail::field(k, "cy_px", c.intrinsics.cy);
    }
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        detail::reject_unknown_keys(
            t, {"tau_rep_px", "tau_r_px", "tau_dr", "tau_r_floor_px", "tau_gamma", "alpha",
                "strategy"},
            "thresholds.");
        c.thresholds.tau_rep = detail::field(t, "tau_rep_px", c.thresholds.tau_rep);
        c.thresholds.tau_r = detail::field(t, "tau_r_px", c.thresholds.tau_r);
        c.thresholds.tau_dr = detail::field(t, "tau_dr", c.thresholds.tau_dr);
        c.thresholds.tau_r_floor = detail::field(t, "tau_r_floor_px", c.thresholds.tau_r_floor);
        c.thresholds.tau_gamma = detail::field(t, "tau_gamma", c.thresholds.tau_gamma);
        c.thresholds.alpha = detail::field(t, "alpha", c.thresholds.alpha);
        c.thresholds.strategy =
            strategy_from_name(detail::field<std::string>(t, "strategy",
                                                          strategy_name(c.thresholds.strategy)));
    }

    // Range validation, each diagnostic naming its field.
    if (c.depths_mm.empty()) throw InvalidParameterError("depths_mm must be non-empty");
    for (double d : c.depths_mm) {
        if (!(d > 0.0)) throw InvalidParameterError("depths_mm entries must be > 0");
    }
    if (c.off_axes_mm.empty()) throw InvalidParameterError("off_axes_mm must be non-empty");
    for (double o : c.off_axes_mm) {
        if (o < 0.0) throw InvalidParameterError("off_axes_mm entries must be >= 0");
    }
    if (c.repeats < 1) throw InvalidParameterError("repeats must be >= 1");
    if (c.orientation_bound_deg < 0.0) {
        throw InvalidParameterError("orientation_bound_deg must be >= 0");
    }
    if (c.pixel_sigma_px < 0.0) throw InvalidParameterError("pixel_sigma_px must be >= 0");
    if (!(c.success_pos_threshold_mm > 0.0)) {
        throw InvalidParameterError("success_pos_threshold_mm must be > 0");
    }
    if (!(c.success_ori_threshold_deg > 0.0)) {
        throw InvalidParameterError("success_ori_threshold_deg must be > 0");
    }
    if (c.estimator != "epnp_gn" && c.estimator != "epnp") {
        throw InvalidParameterError("estimator must be 'epnp_gn' or 'epnp'");
    }
    if (c.refine_max_iter < 1) throw InvalidParameterError("refine_max_iter must be >= 1");
    if (!(c.refine_tol_px > 0.0)) throw InvalidParameterError("refine_tol_px must be > 0");
    if (c.gamma_distance != "true" && c.gamma_distance != "estimated") {
        throw InvalidParameterError("gamma_distance must be 'true' or 'estimated'");
    }
    if (c.goal_policy != "hold" && c.goal_policy != "standoff") {
        throw InvalidParameterError("goal_policy must be 'hold' or 'standoff'");
    }
    if (!(c.goal_standoff_mm > 0.0)) throw InvalidParameterError("goal_standoff_mm must be > 0");
    try {
        validate_intrinsics(c.intrinsics);
    } catch (const InvalidParameterError&) {
        throw InvalidParameterError("intrinsics: fx_px and fy_px must be > 0");
    }
    validate_thresholds(c.thresholds);
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// --- realizing a config into simulator inputs ---

inline TargetModel make_target(const RunConfig& c) {
    if (c.target == "box") {
        return default_box_target();
    }
    return load_target_model_file(c.target);
}

inline SimOptions make_sim_options(const RunConfig& c) {
    SimOptions o;
    o.goal_policy = (c.goal_policy == "hold") ? GoalPolicy::HoldObserved : GoalPolicy::Standoff;
    o.goal_standoff_mm = c.goal_standoff_mm;
    o.gamma_distance =
        (c.gamma_distance == "true") ? GammaDistance::True : GammaDistance::Estimated;
    return o;
}

inline std::unique_ptr<PoseEstimator> make_estimator(const RunConfig& c) {
    if (c.estimator == "epnp") {
        return std::make_unique<EpnpEstimator>();
    }
    return std::make_unique<EpnpGaussNewtonEstimator>(
        RefineOptions{c.refine_max_iter, c.refine_tol_px});
}

/// Scenario list: cartesian product of depths (outer) and off-axis values
/// (inner); scenario_id indexes this order.
inline std::vector<Scenario> make_scenarios(const RunConfig& c) {
    std::vector<Scenario> scenarios;
    scenarios.reserve(c.depths_mm.size() * c.off_axes_mm.size());
    for (double depth : c.depths_mm) {
        for (double off : c.off_axes_mm) {
            Scenario s;
            s.depth_mm = depth;
            s.off_axis_mm = off;
            s.orientation_bound_deg = c.orientation_bound_deg;
            s.pixel_sigma_px = c.pixel_sigma_px;
            s.handeye_perturb_deg = c.handeye_perturb_deg;
            s.handeye_perturb_mm = c.handeye_perturb_mm;
            s.success_pos_threshold_mm = c.success_pos_threshold_mm;
            s.success_ori_threshold_deg = c.success_ori_threshold_deg;
            scenarios.push_back(s);
        }
    }
    return scenarios;
}

}  // namespace posegate
