#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "posegate/errors.hpp"
#include "posegate/gating.hpp"
#include "posegate/simulator.hpp"

#include <json.hpp>

namespace posegate {

/// Aggregate statistics over a set of trial outcomes. Means, standard
/// deviations, and tail metrics are computed over finite errors; trials with
/// sentinel (infinite) errors are counted as failures and reported
/// separately in sentinel_failures. Std uses the n-1 denominator (0 for a
/// single sample); P95 is the nearest-rank order statistic.
struct MetricsSummary {
    double success_rate_pct = 0.0;
    double pos_mean_mm = 0.0;
    double pos_std_mm = 0.0;
    double ori_mean_deg = 0.0;
    double ori_std_deg = 0.0;
    double pos_p95_mm = 0.0;
    double pos_max_mm = 0.0;
    double ori_p95_deg = 0.0;  // orientation tail metrics are an extension
    double ori_max_deg = 0.0;
    std::uint64_t failures = 0;
    std::uint64_t sentinel_failures = 0;
    std::uint64_t total = 0;
    TriggerStats triggers;
};

namespace detail {

/// Nearest-rank percentile: the ceil(q * n)-th order statistic.
inline double nearest_rank(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

inline void mean_std(const std::vector<double>& values, double* mean, double* std_dev) {
    if (values.empty()) {
        *mean = 0.0;
        *std_dev = 0.0;
        return;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    *mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) {
        *std_dev = 0.0;
        return;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - *mean) * (v - *mean);
    *std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace detail

inline MetricsSummary summarize(const std::vector<TrialOutcome>& outcomes) {
    if (outcomes.empty()) {
        throw EmptyInputError("summarize: empty outcome list");
    }
    MetricsSummary s;
    s.total = outcomes.size();
    std::vector<double> pos, ori;
    pos.reserve(outcomes.size());
    ori.reserve(outcomes.size());
    std::uint64_t successes = 0;
    for (const auto& o : outcomes) {
        if (o.success) ++successes;
        if (std::isfinite(o.pos_err_mm) && std::isfinite(o.ori_err_deg)) {
            pos.push_back(o.pos_err_mm);
            ori.push_back(o.ori_err_deg);
        } else {
            ++s.sentinel_failures;
        }
        s.triggers = accumulate(s.triggers, o.report);
    }
    s.failures = s.total - successes;
    s.success_rate_pct = 100.0 * static_cast<double>(successes) / static_cast<double>(s.total);
    detail::mean_std(pos, &s.pos_mean_mm, &s.pos_std_mm);
    detail::mean_std(ori, &s.ori_mean_deg, &s.ori_std_deg);
    if (!pos.empty()) {
        s.pos_p95_mm = detail::nearest_rank(pos, 0.95);
        s.pos_max_mm = *std::max_element(pos.begin(), pos.end());
        s.ori_p95_deg = detail::nearest_rank(ori, 0.95);
        s.ori_max_deg = *std::max_element(ori.begin(), ori.end());
    }
    return s;
}

enum class GroupKey { Depth, OffAxis, Mode };

inline std::string to_string(GatingMode mode) {
    return mode == GatingMode::On ? "on" : "off";
}

struct GroupedSummary {
    std::string label;
    double sort_key = 0.0;
    MetricsSummary summary;
};

namespace detail {

inline std::string format_mm(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

/// Partitions outcomes by the key (disjoint and exhaustive) and summarizes
/// each group, ordered by the key value.
inline std::vector<GroupedSummary> group_by(const std::vector<TrialOutcome>& outcomes,
                                            GroupKey key) {
    if (outcomes.empty()) {
        throw EmptyInputError("group_by: empty outcome list");
    }
    std::map<double, std::vector<TrialOutcome>> parts;
    for (const auto& o : outcomes) {
        double k = 0.0;
        switch (key) {
            case GroupKey::Depth: k = o.depth_mm; break;
            case GroupKey::OffAxis: k = o.off_axis_mm; break;
            case GroupKey::Mode: k = (o.mode == GatingMode::On) ? 1.0 : 0.0; break;
        }
        parts[k].push_back(o);
    }
    std::vector<GroupedSummary> grouped;
    grouped.reserve(parts.size());
    for (const auto& [k, list] : parts) {
        GroupedSummary g;
        g.sort_key = k;
        g.label = (key == GroupKey::Mode) ? to_string(k == 1.0 ? GatingMode::On : GatingMode::Off)
                                          : detail::format_mm(k);
        g.summary = summarize(list);
        grouped.push_back(std::move(g));
    }
    return grouped;
}

enum class RenderFormat { Csv, Json, Markdown };

inline RenderFormat parse_render_format(std::string_view s) {
    if (s == "csv") return RenderFormat::Csv;
    if (s == "json") return RenderFormat::Json;
    if (s == "md" || s == "markdown") return RenderFormat::Markdown;
    throw InvalidParameterError("unknown render format: " + std::string(s));
}

namespace detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::vector<std::string> summary_columns() {
    return {"label",       "success_rate_pct", "pos_mean_mm",  "pos_std_mm",
            "ori_mean_deg", "ori_std_deg",     "pos_p95_mm",   "pos_max_mm",
            "ori_p95_deg",  "ori_max_deg",     "failures",     "sentinel_failures",
            "total",        "rep_triggers",    "gn_triggers",  "prox_triggers",
            "gated_union"};
}

inline std::vector<std::string> summary_row(const std::string& label, const MetricsSummary& s) {
    return {label,
            fixed(s.success_rate_pct, 1),
            fixed(s.pos_mean_mm, 2),
            fixed(s.pos_std_mm, 2),
            fixed(s.ori_mean_deg, 2),
            fixed(s.ori_std_deg, 2),
            fixed(s.pos_p95_mm, 2),
            fixed(s.pos_max_mm, 2),
            fixed(s.ori_p95_deg, 2),
            fixed(s.ori_max_deg, 2),
            std::to_string(s.failures),
            std::to_string(s.sentinel_failures),
            std::to_string(s.total),
            std::to_string(s.triggers.rep_count),
            std::to_string(s.triggers.gn_count),
            std::to_string(s.triggers.prox_count),
            std::to_string(s.triggers.gated_union_count)};
}

inline std::string render_csv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

inline std::string render_markdown(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    std::string out;
    auto emit_row = [&](const std::vector<std::string>& row) {
        out += '|';
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += ' ';
            out += row[i];
            out.append(widths[i] - row[i].size() + 1, ' ');
            out += '|';
        }
        out += '\n';
    };
    emit_row(rows.front());
    out += '|';
    for (std::size_t w : widths) {
        out.append(w + 2, '-');
        out += '|';
    }
    out += '\n';
    for (std::size_t r = 1; r < rows.size(); ++r) emit_row(rows[r]);
    return out;
}

inline nlohmann::ordered_json summary_json(const MetricsSummary& s) {
    nlohmann::ordered_json j;
    j["success_rate_pct"] = fixed(s.success_rate_pct, 1);
    j["pos_mean_mm"] = fixed(s.pos_mean_mm, 2);
    j["pos_std_mm"] = fixed(s.pos_std_mm, 2);
    j["ori_mean_deg"] = fixed(s.ori_mean_deg, 2);
    j["ori_std_deg"] = fixed(s.ori_std_deg, 2);
    j["pos_p95_mm"] = fixed(s.pos_p95_mm, 2);
    j["pos_max_mm"] = fixed(s.pos_max_mm, 2);
    j["ori_p95_deg"] = fixed(s.ori_p95_deg, 2);
    j["ori_max_deg"] = fixed(s.ori_max_deg, 2);
    j["failures"] = s.failures;
    j["sentinel_failures"] = s.sentinel_failures;
    j["total"] = s.total;
    j["triggers"] = {{"rep", s.triggers.rep_count},
                     {"gn", s.triggers.gn_count},
                     {"prox", s.triggers.prox_count},
                     {"union", s.triggers.gated_union_count},
                     {"total", s.triggers.total_trials}};
    return j;
}

}  // namespace detail

/// Renders a single summary. Rates use one decimal, millimeters and degrees
/// two; output is byte-stable for identical inputs.
inline std::string render(const MetricsSummary& summary, RenderFormat format) {
    switch (format) {
        case RenderFormat::Json:
            return detail::summary_json(summary).dump(2) + "\n";
        case RenderFormat::Csv: {
            std::vector<std::vector<std::string>> rows;
            rows.push_back(detail::summary_columns());
            rows.push_back(detail::summary_row("all", summary));
            return detail::render_csv(rows);
        }
        case RenderFormat::Markdown: {
            std::vector<std::vector<std::string>> rows;
            rows.push_back(detail::summary_columns());
            rows.push_back(detail::summary_row("all", summary));
            return detail::render_markdown(rows);
        }
    }
    throw InvalidParameterError("render: unknown format");
}

/// Renders a grouped map; key_name labels the first column.
inline std::string render(const std::vector<GroupedSummary>& grouped, RenderFormat format,
                          std::string_view key_name) {
    if (grouped.empty()) {
        throw EmptyInputError("render: empty grouped summary");
    }
    if (format == RenderFormat::Json) {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& g : grouped) {
            nlohmann::ordered_json entry;
            entry[std::string(key_name)] = g.label;
            entry["summary"] = detail::summary_json(g.summary);
            j.push_back(entry);
        }
        return j.dump(2) + "\n";
    }
    std::vector<std::vector<std::string>> rows;
    auto header = detail::summary_columns();
    header[0] = std::string(key_name);
    rows.push_back(header);
    for (const auto& g : grouped) {
        rows.push_back(detail::summary_row(g.label, g.summary));
    }
    return format == RenderFormat::Csv ? detail::render_csv(rows) : detail::render_markdown(rows);
}

}  // namespace posegate
