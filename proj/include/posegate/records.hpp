#pragma once

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "posegate/errors.hpp"
#include "posegate/se3.hpp"
#include "posegate/simulator.hpp"

namespace posegate {

using ordered_json = nlohmann::ordered_json;

// --- pose serialization: unit quaternion (w, x, y, z) + translation mm ---

inline ordered_json pose_to_json(const Pose& p) {
    const Eigen::Quaterniond& q = p.rotation.quaternion();
    ordered_json j;
    j["rotation"] = {q.w(), q.x(), q.y(), q.z()};
    j["translation_mm"] = {p.translation.x(), p.translation.y(), p.translation.z()};
    return j;
}

inline Pose pose_from_json(const nlohmann::json& j) {
    const auto& r = j.at("rotation");
    const auto& t = j.at("translation_mm");
    if (r.size() != 4 || t.size() != 3) {
        throw InvalidInputError("pose: rotation needs 4 entries (w,x,y,z), translation 3");
    }
    return Pose{Rotation(Eigen::Quaterniond(r[0].get<double>(), r[1].get<double>(),
                                            r[2].get<double>(), r[3].get<double>())),
                Eigen::Vector3d(t[0].get<double>(), t[1].get<double>(), t[2].get<double>())};
}

// --- enum names used on the wire ---

inline std::string mode_name(GatingMode m) { return m == GatingMode::On ? "on" : "off"; }

inline GatingMode mode_from_name(const std::string& s) {
    if (s == "on") return GatingMode::On;
    if (s == "off") return GatingMode::Off;
    throw InvalidInputError("unknown gating mode: " + s);
}

inline std::string decision_name(GatingDecision::Kind k) {
    switch (k) {
        case GatingDecision::Kind::ExecuteFull: return "execute_full";
        case GatingDecision::Kind::Rejected: return "rejected";
        case GatingDecision::Kind::Scaled: return "scaled";
    }
    return "execute_full";
}

inline GatingDecision::Kind decision_from_name(const std::string& s) {
    if (s == "execute_full") return GatingDecision::Kind::ExecuteFull;
    if (s == "rejected") return GatingDecision::Kind::Rejected;
    if (s == "scaled") return GatingDecision::Kind::Scaled;
    throw InvalidInputError("unknown gating decision: " + s);
}

namespace detail {

// JSON has no infinity; sentinel errors travel as null.
inline ordered_json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline double double_or_inf(const nlohmann::json& j) {
    if (j.is_null()) return std::numeric_limits<double>::infinity();
    return j.get<double>();
}

}  // namespace detail

/// One trial as a newline-delimited record object. Field order is fixed.
inline ordered_json trial_to_json(const TrialOutcome& o) {
    ordered_json j;
    j["type"] = "trial";
    j["scenario_id"] = o.scenario_id;
    j["repeat_id"] = o.repeat_id;
    j["mode"] = mode_name(o.mode);
    j["depth_mm"] = o.depth_mm;
    j["off_axis_mm"] = o.off_axis_mm;
    j["pos_err_mm"] = detail::finite_or_null(o.pos_err_mm);
    j["ori_err_deg"] = detail::finite_or_null(o.ori_err_deg);
    j["success"] = o.success;
    j["decision"] = decision_name(o.decision.kind);
    j["alpha"] = o.decision.alpha;
    j["gated"] = o.decision.gated();
    j["reliable"] = o.report.reliable;
    j["rep_trigger"] = o.report.rep_trigger;
    j["gn_trigger"] = o.report.gn_trigger;
    j["prox_trigger"] = o.report.prox_trigger;
    j["e_rep_px"] = detail::finite_or_null(o.report.e_rep);
    j["r_gn_px"] = detail::finite_or_null(o.report.r_gn);
    if (o.report.delta_r.has_value()) {
        j["delta_r"] = *o.report.delta_r;
    } else {
        j["delta_r"] = nullptr;
    }
    j["gamma"] = o.report.gamma;
    j["seed"] = o.seed;
    return j;
}

inline TrialOutcome trial_from_json(const nlohmann::json& j) {
    TrialOutcome o;
    o.scenario_id = j.at("scenario_id").get<int>();
    o.repeat_id = j.at("repeat_id").get<int>();
    o.mode = mode_from_name(j.at("mode").get<std::string>());
    o.depth_mm = j.at("depth_mm").get<double>();
    o.off_axis_mm = j.at("off_axis_mm").get<double>();
    o.pos_err_mm = detail::double_or_inf(j.at("pos_err_mm"));
    o.ori_err_deg = detail::double_or_inf(j.at("ori_err_deg"));
    o.success = j.at("success").get<bool>();
    o.decision.kind = decision_from_name(j.at("decision").get<std::string>());
    o.decision.alpha = j.at("alpha").get<double>();
    o.report.reliable = j.at("reliable").get<bool>();
    o.report.rep_trigger = j.at("rep_trigger").get<bool>();
    o.report.gn_trigger = j.at("gn_trigger").get<bool>();
    o.report.prox_trigger = j.at("prox_trigger").get<bool>();
    o.report.e_rep = detail::double_or_inf(j.at("e_rep_px"));
    o.report.r_gn = detail::double_or_inf(j.at("r_gn_px"));
    if (!j.at("delta_r").is_null()) {
        o.report.delta_r = j.at("delta_r").get<double>();
    }
    o.report.gamma = j.at("gamma").get<double>();
    o.seed = j.at("seed").get<std::uint64_t>();
    return o;
}

struct RecordFile {
    ordered_json header;
    std::vector<TrialOutcome> trials;
};

/// Writes the record stream: one header object line, then one line per
/// trial, in input order. The format streams and appends cleanly.
inline void write_records(std::ostream& out, const ordered_json& header,
                          const std::vector<TrialOutcome>& trials) {
    out << header.dump() << '\n';
    for (const auto& t : trials) {
        out << trial_to_json(t).dump() << '\n';
    }
}

/// Parses a record stream; malformed lines raise InvalidInputError with the
/// 1-based line number.
inline RecordFile read_records(std::istream& in) {
    RecordFile file;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInputError("records line " + std::to_string(line_no) + ": " + e.what());
        }
        const std::string type = j.value("type", "");
        if (type == "header") {
            if (have_header) {
                throw InvalidInputError("records line " + std::to_string(line_no) +
                                        ": duplicate header");
            }
            file.header = ordered_json(j);
            have_header = true;
        } else if (type == "trial") {
            try {
                file.trials.push_back(trial_from_json(j));
            } catch (const nlohmann::json::exception& e) {
                throw InvalidInputError("records line " + std::to_string(line_no) + ": " +
                                        e.what());
            }
        } else {
            throw InvalidInputError("records line " + std::to_string(line_no) +
                                    ": unknown record type '" + type + "'");
        }
    }
    if (!have_header) {
        throw InvalidInputError("records: missing header line");
    }
    return file;
}

// --- flat per-trial CSV (plot-ready) ---

inline std::string trial_csv_header() {
    return "scenario_id,repeat_id,mode,depth_mm,off_axis_mm,pos_err_mm,ori_err_deg,success,"
           "gated,rep_trigger,gn_trigger,prox_trigger,e_rep_px,r_gn_px,delta_r,gamma,seed";
}

namespace detail {

/// Shortest round-trip decimal representation, "inf" for sentinel errors.
inline std::string csv_num(double v) {
    if (!std::isfinite(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return nlohmann::json(v).dump();
}

}  // namespace detail

inline std::string trial_to_csv_row(const TrialOutcome& o) {
    std::string row;
    row += std::to_string(o.scenario_id);
    row += ',' + std::to_string(o.repeat_id);
    row += ',' + mode_name(o.mode);
    row += ',' + detail::csv_num(o.depth_mm);
    row += ',' + detail::csv_num(o.off_axis_mm);
    row += ',' + detail::csv_num(o.pos_err_mm);
    row += ',' + detail::csv_num(o.ori_err_deg);
    row += ',' + std::string(o.success ? "1" : "0");
    row += ',' + std::string(o.decision.gated() ? "1" : "0");
    row += ',' + std::string(o.report.rep_trigger ? "1" : "0");
    row += ',' + std::string(o.report.gn_trigger ? "1" : "0");
    row += ',' + std::string(o.report.prox_trigger ? "1" : "0");
    row += ',' + detail::csv_num(o.report.e_rep);
    row += ',' + detail::csv_num(o.report.r_gn);
    row += ',';
    if (o.report.delta_r.has_value()) row += detail::csv_num(*o.report.delta_r);
    row += ',' + detail::csv_num(o.report.gamma);
    row += ',' + std::to_string(o.seed);
    return row;
}

}  // namespace posegate
