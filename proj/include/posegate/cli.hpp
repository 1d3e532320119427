#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "posegate/config.hpp"
#include "posegate/metrics.hpp"
#include "posegate/records.hpp"
#include "posegate/simulator.hpp"
#include "posegate/version.hpp"

namespace posegate::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 2;  // invalid config, records, arguments
inline constexpr int kExitEnvError = 3;   // unwritable output, I/O failure

namespace detail {

inline std::vector<GatingMode> parse_modes(const std::string& modes_csv) {
    std::vector<GatingMode> modes;
    std::stringstream ss(modes_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        modes.push_back(mode_from_name(token));
    }
    if (modes.empty()) {
        throw InvalidParameterError("--modes: expected a comma-separated subset of on,off");
    }
    return modes;
}

inline std::string pose_brief(const Pose& p) {
    const Eigen::Quaterniond& q = p.rotation.quaternion();
    char buf[160];
    std::snprintf(buf, sizeof(buf), "q(wxyz)=[%.6f %.6f %.6f %.6f] t=[%.3f %.3f %.3f] mm", q.w(),
                  q.x(), q.y(), q.z(), p.translation.x(), p.translation.y(), p.translation.z());
    return buf;
}

inline std::string num(double v) { return posegate::detail::csv_num(v); }

}  // namespace detail

/// `defaults`: prints the default config JSON to stdout.
inline int cmd_defaults(std::ostream& out) {
    out << config_to_json(default_config()).dump(2) << '\n';
    return kExitOk;
}

/// `sweep`: runs the configured grid and writes the record file.
inline int cmd_sweep(const std::string& config_path, const std::string& out_path,
                     const std::string& modes_csv, std::optional<std::uint64_t> seed_override,
                     std::ostream& diag) {
    RunConfig config;
    std::vector<GatingMode> modes;
    try {
        config = load_config_file(config_path);
        modes = detail::parse_modes(modes_csv);
        if (seed_override.has_value()) {
            config.base_seed = *seed_override;
        }
    } catch (const std::runtime_error& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUserError;
    }

    TargetModel target;
    try {
        target = make_target(config);
    } catch (const std::runtime_error& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUserError;
    }

    SweepGrid grid;
    grid.scenarios = make_scenarios(config);
    grid.repeats = config.repeats;
    grid.base_seed = config.base_seed;
    grid.modes = modes;

    const auto estimator = make_estimator(config);
    const std::vector<TrialOutcome> outcomes =
        run_sweep(grid, *estimator, config.thresholds, target, config.intrinsics,
                  make_sim_options(config));

    ordered_json header;
    header["type"] = "header";
    header["format"] = "posegate-records";
    header["format_version"] = kRecordFormatVersion;
    header["artifact_version"] = kArtifactVersion;
    header["base_seed"] = config.base_seed;
    {
        ordered_json m = ordered_json::array();
        std::vector<GatingMode> sorted = modes;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (GatingMode mode : sorted) m.push_back(mode_name(mode));
        header["modes"] = m;
    }
    header["config"] = config_to_json(config);
    header["canonical"] = {{"base_from_ee_initial", pose_to_json(canonical_base_from_ee())},
                           {"ee_from_cam", pose_to_json(canonical_ee_from_cam())}};
    header["effective_scale_mm"] = effective_scale(target);
    header["target_points"] = target.size();

    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        diag << "error: cannot open output file for writing: " << out_path << '\n';
        return kExitEnvError;
    }
    write_records(out, header, outcomes);
    out.flush();
    if (!out) {
        diag << "error: write failed: " << out_path << '\n';
        return kExitEnvError;
    }
    diag << "wrote " << outcomes.size() << " trials to " << out_path << '\n';
    return kExitOk;
}

namespace detail {

inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    return posegate::detail::render_markdown(rows);
}

inline std::map<GatingMode, std::vector<TrialOutcome>> split_modes(
    const std::vector<TrialOutcome>& trials) {
    std::map<GatingMode, std::vector<TrialOutcome>> by_mode;
    for (const auto& t : trials) by_mode[t.mode].push_back(t);
    return by_mode;
}

inline void report_markdown(const RecordFile& file, const std::string& group, std::ostream& out) {
    using posegate::detail::fixed;
    const auto by_mode = split_modes(file.trials);

    out << "# Alignment report\n\n";
    out << "trials: " << file.trials.size();
    out << " (";
    bool first = true;
    for (const auto& [mode, list] : by_mode) {
        if (!first) out << ", ";
        out << mode_name(mode) << ": " << list.size();
        first = false;
    }
    out << ")\n\n";

    out << "## Overall\n";
    {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"mode", "success_rate_pct", "pos_mean_mm", "pos_std_mm", "ori_mean_deg",
                        "ori_std_deg", "failures", "total"});
        for (const auto& [mode, list] : by_mode) {
            const MetricsSummary s = summarize(list);
            rows.push_back({mode_name(mode), fixed(s.success_rate_pct, 1), fixed(s.pos_mean_mm, 2),
                            fixed(s.pos_std_mm, 2), fixed(s.ori_mean_deg, 2),
                            fixed(s.ori_std_deg, 2), std::to_string(s.failures),
                            std::to_string(s.total)});
        }
        out << render_table(rows) << '\n';
    }

    auto grouped_success = [&](GroupKey key, const std::string& key_name) {
        out << "## Success rate vs " << key_name << "\n";
        std::map<std::string, std::map<GatingMode, double>> table;
        std::vector<std::pair<double, std::string>> order;
        for (const auto& [mode, list] : by_mode) {
            for (const auto& g : group_by(list, key)) {
                if (table.find(g.label) == table.end()) {
                    order.emplace_back(g.sort_key, g.label);
                }
                table[g.label][mode] = g.summary.success_rate_pct;
            }
        }
        std::sort(order.begin(), order.end());
        std::vector<std::vector<std::string>> rows;
        std::vector<std::string> header{key_name};
        for (const auto& [mode, list] : by_mode) header.push_back(mode_name(mode));
        rows.push_back(header);
        for (const auto& [sort_key, label] : order) {
            std::vector<std::string> row{label};
            for (const auto& [mode, list] : by_mode) {
                const auto it = table[label].find(mode);
                row.push_back(it == table[label].end() ? "-" : fixed(it->second, 1));
            }
            rows.push_back(row);
        }
        out << render_table(rows) << '\n';
    };

    if (group.empty() || group == "depth") grouped_success(GroupKey::Depth, "depth_mm");
    if (group.empty() || group == "off_axis") grouped_success(GroupKey::OffAxis, "off_axis_mm");

    out << "## Tail risk (orientation columns are an extension)\n";
    {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"mode", "pos_p95_mm", "pos_max_mm", "ori_p95_deg", "ori_max_deg"});
        for (const auto& [mode, list] : by_mode) {
            const MetricsSummary s = summarize(list);
            rows.push_back({mode_name(mode), fixed(s.pos_p95_mm, 2), fixed(s.pos_max_mm, 2),
                            fixed(s.ori_p95_deg, 2), fixed(s.ori_max_deg, 2)});
        }
        out << render_table(rows) << '\n';
    }

    out << "## Trigger statistics\n";
    {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"mode", "rep", "gn", "prox", "union", "total"});
        for (const auto& [mode, list] : by_mode) {
            const MetricsSummary s = summarize(list);
            rows.push_back({mode_name(mode), std::to_string(s.triggers.rep_count),
                            std::to_string(s.triggers.gn_count),
                            std::to_string(s.triggers.prox_count),
                            std::to_string(s.triggers.gated_union_count),
                            std::to_string(s.triggers.total_trials)});
        }
        out << render_table(rows);
    }
}

inline void report_json(const RecordFile& file, const std::string& group, std::ostream& out) {
    const auto by_mode = split_modes(file.trials);
    ordered_json j;
    j["trials"] = file.trials.size();
    for (const auto& [mode, list] : by_mode) {
        j["overall"][mode_name(mode)] = posegate::detail::summary_json(summarize(list));
    }
    auto grouped = [&](GroupKey key) {
        ordered_json g;
        for (const auto& [mode, list] : by_mode) {
            for (const auto& entry : group_by(list, key)) {
                g[entry.label][mode_name(mode)] = posegate::detail::summary_json(entry.summary);
            }
        }
        return g;
    };
    if (group.empty() || group == "depth") j["by_depth"] = grouped(GroupKey::Depth);
    if (group.empty() || group == "off_axis") j["by_off_axis"] = grouped(GroupKey::OffAxis);
    out << j.dump(2) << '\n';
}

inline void report_csv(const RecordFile& file, std::ostream& out) {
    out << trial_csv_header() << '\n';
    for (const auto& t : file.trials) {
        out << trial_to_csv_row(t) << '\n';
    }
}

}  // namespace detail

/// `report`: renders summary tables (md/json) or the flat per-trial CSV.
inline int cmd_report(const std::string& records_path, const std::string& format,
                      const std::string& group, std::ostream& out, std::ostream& diag) {
    if (!group.empty() && group != "depth" && group != "off_axis") {
        diag << "error: --group must be 'depth' or 'off_axis'\n";
        return kExitUserError;
    }
    std::ifstream in(records_path, std::ios::binary);
    if (!in) {
        diag << "error: cannot open records file: " << records_path << '\n';
        return kExitUserError;
    }
    RecordFile file;
    try {
        file = read_records(in);
        if (file.trials.empty()) {
            throw InvalidInputError("records contain no trials");
        }
        if (format == "md" || format == "markdown") {
            detail::report_markdown(file, group, out);
        } else if (format == "json") {
            detail::report_json(file, group, out);
        } else if (format == "csv") {
            detail::report_csv(file, out);
        } else {
            throw InvalidParameterError("--format must be csv, json, or md");
        }
    } catch (const std::runtime_error& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUserError;
    }
    return kExitOk;
}

/// `trial`: runs one (scenario, repeat) cell with gating enabled and prints
/// each stage of the six-step procedure.
inline int cmd_trial(const std::string& config_path, int scenario_index, int repeat_index,
                     bool verbose, std::ostream& out, std::ostream& diag) {
    RunConfig config;
    TargetModel target;
    try {
        config = load_config_file(config_path);
        target = make_target(config);
    } catch (const std::runtime_error& e) {
        diag << "error: " << e.what() << '\n';
        return kExitUserError;
    }
    const auto scenarios = make_scenarios(config);
    if (scenario_index < 0 || scenario_index >= static_cast<int>(scenarios.size())) {
        diag << "error: scenario index " << scenario_index << " out of range [0, "
             << scenarios.size() - 1 << "]\n";
        return kExitUserError;
    }
    if (repeat_index < 0 || repeat_index >= config.repeats) {
        diag << "error: repeat index " << repeat_index << " out of range [0, "
             << config.repeats - 1 << "]\n";
        return kExitUserError;
    }

    const Scenario& s = scenarios[scenario_index];
    const std::uint64_t seed = mix_seed(config.base_seed, scenario_index, repeat_index);
    Rng rng(seed);
    const auto estimator = make_estimator(config);
    const TrialTrace trace = run_trial_traced(s, *estimator, config.thresholds, true, target,
                                              config.intrinsics, rng, make_sim_options(config));
    const TrialOutcome& o = trace.outcome;

    out << "trial scenario=" << scenario_index << " repeat=" << repeat_index << " seed=" << seed
        << "\n";
    out << "scenario: depth=" << detail::num(s.depth_mm) << " mm, off_axis="
        << detail::num(s.off_axis_mm) << " mm, orientation_bound=" << detail::num(s.orientation_bound_deg)
        << " deg, pixel_sigma=" << detail::num(s.pixel_sigma_px) << " px\n";
    out << "[1/6] estimate relative target pose (" << estimator->name() << ")\n";
    out << "  true  cam_from_target: " << detail::pose_brief(trace.true_cam_from_target) << "\n";
    if (trace.estimator_failed) {
        out << "  estimator FAILED; sentinel outcome\n";
    } else {
        out << "  est   cam_from_target: " << detail::pose_brief(trace.estimate.cam_from_target)
            << "\n";
        if (verbose) {
            out << "  observations (px):\n";
            for (std::size_t i = 0; i < trace.correspondences.pixels.size(); ++i) {
                const auto& p = trace.correspondences.pixels.pixels[i];
                out << "    [" << i << "] " << detail::num(p.x()) << ", " << detail::num(p.y())
                    << "\n";
            }
            out << "  residual trace (px):";
            for (double r : trace.estimate.trace.residuals) out << ' ' << detail::num(r);
            out << "\n";
        }
    }
    out << "[2/6] reliability quantities\n";
    out << "  e_rep = " << detail::num(o.report.e_rep) << " px, r_gn = "
        << detail::num(o.report.r_gn) << " px, delta_r = "
        << (o.report.delta_r.has_value() ? detail::num(*o.report.delta_r) : std::string("n/a"))
        << ", gamma = " << detail::num(o.report.gamma) << "\n";
    out << "[3/6] reliability decision\n";
    out << "  triggers: rep=" << (o.report.rep_trigger ? "yes" : "no")
        << " gn=" << (o.report.gn_trigger ? "yes" : "no")
        << " prox=" << (o.report.prox_trigger ? "yes" : "no")
        << " -> reliable=" << (o.report.reliable ? "yes" : "no") << "\n";
    out << "[4/6] " << (o.report.reliable ? "reliable: execute target pose directly"
                                          : "unreliable: direct execution withheld")
        << "\n";
    out << "[5/6] gating action: " << decision_name(o.decision.kind);
    if (o.decision.kind == GatingDecision::Kind::Scaled) {
        out << " (alpha = " << detail::num(o.decision.alpha) << ")";
    }
    out << "\n";
    out << "[6/6] execute final motion command\n";
    if (!trace.estimator_failed) {
        out << "  commanded ee pose: " << detail::pose_brief(trace.new_target) << "\n";
        out << "  executed  ee pose: " << detail::pose_brief(trace.executed) << "\n";
        out << "  oracle    ee pose: " << detail::pose_brief(trace.oracle) << "\n";
    }
    out << "result: pos_err = " << detail::num(o.pos_err_mm) << " mm, ori_err = "
        << detail::num(o.ori_err_deg) << " deg, success = " << (o.success ? "yes" : "no") << "\n";
    return kExitOk;
}

/// `compare`: paired differences between two record sets covering identical
/// trial keys.
inline int cmd_compare(const std::string& path_a, const std::string& path_b, std::ostream& out,
                       std::ostream& diag) {
    auto load = [&](const std::string& path, RecordFile* file) -> bool {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            diag << "error: cannot open records file: " << path << '\n';
            return false;
        }
        try {
            *file = read_records(in);
        } catch (const std::runtime_error& e) {
            diag << "error: " << path << ": " << e.what() << '\n';
            return false;
        }
        return true;
    };
    RecordFile a, b;
    if (!load(path_a, &a) || !load(path_b, &b)) return kExitUserError;

    // Key: (scenario, repeat, seed); the gating mode joins the key only when
    // needed to keep keys unique (record sets holding both modes).
    using Key = std::tuple<int, int, std::uint64_t, int>;
    auto build = [](const std::vector<TrialOutcome>& trials, bool with_mode,
                    std::map<Key, const TrialOutcome*>* map) -> bool {
        map->clear();
        for (const auto& t : trials) {
            const Key key{t.scenario_id, t.repeat_id, t.seed,
                          with_mode ? (t.mode == GatingMode::On ? 1 : 0) : 0};
            if (!map->emplace(key, &t).second) return false;  // duplicate key
        }
        return true;
    };

    std::map<Key, const TrialOutcome*> map_a, map_b;
    if (!build(a.trials, false, &map_a) || !build(b.trials, false, &map_b)) {
        // Mixed-mode record sets: retry with the mode as part of the key.
        if (!build(a.trials, true, &map_a) || !build(b.trials, true, &map_b)) {
            diag << "error: duplicate trial keys within a record set\n";
            return kExitUserError;
        }
    }

    std::vector<Key> missing_in_b, missing_in_a;
    for (const auto& [key, trial] : map_a) {
        if (map_b.find(key) == map_b.end()) missing_in_b.push_back(key);
    }
    for (const auto& [key, trial] : map_b) {
        if (map_a.find(key) == map_a.end()) missing_in_a.push_back(key);
    }
    if (!missing_in_b.empty() || !missing_in_a.empty()) {
        diag << "error: record sets do not cover identical trial keys\n";
        auto dump_keys = [&](const char* label, const std::vector<Key>& keys) {
            if (keys.empty()) return;
            diag << "  missing in " << label << ":";
            std::size_t shown = 0;
            for (const auto& [sid, rid, seed, mode] : keys) {
                if (shown++ == 10) {
                    diag << " ... (" << keys.size() << " total)";
                    break;
                }
                diag << " (" << sid << ',' << rid << ',' << seed << ')';
            }
            diag << '\n';
        };
        dump_keys(path_b.c_str(), missing_in_b);
        dump_keys(path_a.c_str(), missing_in_a);
        return kExitUserError;
    }

    out << "key,pos_err_a_mm,pos_err_b_mm,pos_delta_mm,ori_err_a_deg,ori_err_b_deg,ori_delta_deg\n";
    for (const auto& [key, ta] : map_a) {
        const TrialOutcome* tb = map_b.at(key);
        const auto& [sid, rid, seed, mode] = key;
        out << sid << ':' << rid << ':' << seed << ',' << detail::num(ta->pos_err_mm) << ','
            << detail::num(tb->pos_err_mm) << ',' << detail::num(tb->pos_err_mm - ta->pos_err_mm)
            << ',' << detail::num(ta->ori_err_deg) << ',' << detail::num(tb->ori_err_deg) << ','
            << detail::num(tb->ori_err_deg - ta->ori_err_deg) << '\n';
    }

    const MetricsSummary sa = summarize(a.trials);
    const MetricsSummary sb = summarize(b.trials);
    using posegate::detail::fixed;
    out << "\nsummary (B - A deltas)\n";
    out << "success_rate_pct: " << fixed(sa.success_rate_pct, 1) << " -> "
        << fixed(sb.success_rate_pct, 1) << " (delta "
        << fixed(sb.success_rate_pct - sa.success_rate_pct, 1) << ")\n";
    out << "pos_p95_mm: " << fixed(sa.pos_p95_mm, 2) << " -> " << fixed(sb.pos_p95_mm, 2)
        << " (delta " << fixed(sb.pos_p95_mm - sa.pos_p95_mm, 2) << ")\n";
    out << "pos_max_mm: " << fixed(sa.pos_max_mm, 2) << " -> " << fixed(sb.pos_max_mm, 2)
        << " (delta " << fixed(sb.pos_max_mm - sa.pos_max_mm, 2) << ")\n";
    return kExitOk;
}

}  // namespace posegate::cli
