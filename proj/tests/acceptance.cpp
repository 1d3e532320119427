// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one pass/fail line each. Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "posegate/camera.hpp"
#include "posegate/cli.hpp"
#include "posegate/config.hpp"
#include "posegate/gating.hpp"
#include "posegate/metrics.hpp"
#include "posegate/pnp.hpp"
#include "posegate/records.hpp"
#include "posegate/rng.hpp"
#include "posegate/se3.hpp"
#include "posegate/simulator.hpp"
#include "test_helpers.hpp"

using namespace posegate;
using namespace posegate::testing;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

#define REQUIRE_MSG(cond, msg)                   \
    do {                                         \
        if (!(cond)) {                           \
            detail = (msg);                      \
            return false;                        \
        }                                        \
    } while (0)

Pose random_scene_pose(Rng& rng) {
    const Rotation r = exp_rotation(random_unit_vector(rng) * rng.uniform(0.0, 20.0 * kRadPerDeg));
    return Pose{r, Eigen::Vector3d(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                                   rng.uniform(200.0, 1000.0))};
}

Correspondences make_scene(const Pose& cam_from_target, double sigma, Rng& rng) {
    const Intrinsics k;
    const TargetModel box = default_box_target();
    PixelObservations pixels = project(k, cam_from_target, box);
    if (sigma > 0.0) pixels = add_pixel_noise(pixels, sigma, rng);
    return Correspondences{box, pixels, k};
}

SweepGrid paper_grid(const std::vector<double>& depths, int repeats, std::uint64_t seed,
                     double sigma, std::vector<GatingMode> modes) {
    SweepGrid grid;
    for (double depth : depths) {
        for (double off : {0.0, 50.0, 100.0}) {
            Scenario s;
            s.depth_mm = depth;
            s.off_axis_mm = off;
            s.pixel_sigma_px = sigma;
            grid.scenarios.push_back(s);
        }
    }
    grid.repeats = repeats;
    grid.base_seed = seed;
    grid.modes = std::move(modes);
    return grid;
}

// 1. SE(3) algebra: roundtrip, scaling linearity, group laws; >= 1000 cases
//    each; < 5 s.
bool criterion_se3(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(9001);
    for (int i = 0; i < 1000; ++i) {
        const Pose base = random_pose(rng);
        const PoseDelta d = random_delta(rng);
        const Pose target = apply_delta(base, d);
        const PoseDelta rec = pose_diff(target, base);
        REQUIRE_MSG((rec.rotation_vector - d.rotation_vector).norm() < 1e-9,
                    "roundtrip rotation diverged");
        REQUIRE_MSG((rec.translation - d.translation).norm() < 1e-6,
                    "roundtrip translation diverged");

        const double alpha = rng.uniform(1e-3, 1.0);
        const PoseDelta scaled = scale_delta(d, alpha);
        REQUIRE_MSG(std::abs(scaled.rotation_vector.norm() - alpha * d.rotation_vector.norm()) <
                        1e-12,
                    "rotation scaling is not linear");
        REQUIRE_MSG(std::abs(scaled.translation.norm() - alpha * d.translation.norm()) < 1e-9,
                    "translation scaling is not linear");

        const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
        const Pose lhs = compose(compose(a, b), c);
        const Pose rhs = compose(a, compose(b, c));
        REQUIRE_MSG(rotation_angle_rad(lhs.rotation, rhs.rotation) < 1e-9,
                    "compose is not associative (rotation)");
        REQUIRE_MSG((lhs.translation - rhs.translation).norm() < 1e-6,
                    "compose is not associative (translation)");
        const Pose unit = compose(a, inverse(a));
        REQUIRE_MSG(unit.rotation.angle() < 1e-9 && unit.translation.norm() < 1e-6,
                    "inverse law failed");
    }
    const double elapsed = seconds_since(start);
    REQUIRE_MSG(elapsed < 5.0, "exceeded 5 s budget");
    detail = "1000 cases per property in " + std::to_string(elapsed) + " s";
    return true;
}

// 2. Reprojection score matches an independent brute-force loop within 1e-12
//    on 1000 random inputs.
bool criterion_reprojection(std::string& detail) {
    Rng rng(9002);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 24.0));
        PixelObservations obs, rep;
        for (int i = 0; i < n; ++i) {
            obs.pixels.emplace_back(rng.uniform(-2e3, 2e3), rng.uniform(-2e3, 2e3));
            rep.pixels.emplace_back(rng.uniform(-2e3, 2e3), rng.uniform(-2e3, 2e3));
        }
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dx = obs.pixels[i].x() - rep.pixels[i].x();
            const double dy = obs.pixels[i].y() - rep.pixels[i].y();
            total += std::sqrt(dx * dx + dy * dy);
        }
        const double oracle = total / n;
        REQUIRE_MSG(std::abs(reprojection_error(obs, rep) - oracle) <=
                        1e-12 * std::max(1.0, oracle),
                    "score deviates from the brute-force loop");
    }
    detail = "1000 random inputs within 1e-12";
    return true;
}

// 3. EPnP exactness: 200 random noiseless scenes within 1e-6 rad / 1e-3 mm;
//    < 10 s.
bool criterion_epnp(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(9003);
    double worst_rot = 0.0, worst_trans = 0.0;
    for (int i = 0; i < 200; ++i) {
        const Pose truth = random_scene_pose(rng);
        const Pose est = solve_epnp(make_scene(truth, 0.0, rng));
        worst_rot = std::max(worst_rot, rotation_angle_rad(est.rotation, truth.rotation));
        worst_trans = std::max(worst_trans, (est.translation - truth.translation).norm());
    }
    REQUIRE_MSG(worst_rot < 1e-6, "rotation error " + std::to_string(worst_rot) + " rad");
    REQUIRE_MSG(worst_trans < 1e-3, "translation error " + std::to_string(worst_trans) + " mm");
    const double elapsed = seconds_since(start);
    REQUIRE_MSG(elapsed < 10.0, "exceeded 10 s budget");
    {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "worst %.2e rad / %.2e mm in %.2f s", worst_rot,
                      worst_trans, elapsed);
        detail = buf;
    }
    return true;
}

// 4. Gauss-Newton: monotone traces on 100 noisy scenes; analytic Jacobian vs
//    central differences within 1e-4 relative at 100 points.
bool criterion_gauss_newton(std::string& detail) {
    Rng rng(9004);
    for (int i = 0; i < 100; ++i) {
        const Pose truth = random_scene_pose(rng);
        const Correspondences c = make_scene(truth, 1.0, rng);
        const PnPEstimate est = refine_gauss_newton(solve_epnp(c), c);
        for (std::size_t j = 1; j < est.trace.size(); ++j) {
            REQUIRE_MSG(est.trace.residuals[j] <= est.trace.residuals[j - 1],
                        "trace is not non-increasing");
        }
    }
    const double step = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        const Pose pose = random_scene_pose(rng);
        const Correspondences c = make_scene(random_scene_pose(rng), 0.5, rng);
        Eigen::VectorXd residual;
        Eigen::MatrixXd jac;
        reprojection_residual_jacobian(pose, c, &residual, &jac);
        Eigen::MatrixXd fd(jac.rows(), 6);
        for (int d = 0; d < 6; ++d) {
            Eigen::Matrix<double, 6, 1> delta = Eigen::Matrix<double, 6, 1>::Zero();
            delta(d) = step;
            Eigen::VectorXd r_plus, r_minus;
            reprojection_residual_jacobian(
                apply_delta(pose, PoseDelta{delta.head<3>(), delta.tail<3>()}), c, &r_plus,
                nullptr);
            reprojection_residual_jacobian(
                apply_delta(pose, PoseDelta{-delta.head<3>(), -delta.tail<3>()}), c, &r_minus,
                nullptr);
            fd.col(d) = (r_plus - r_minus) / (2.0 * step);
        }
        const double rel = (jac - fd).norm() / std::max(jac.norm(), 1e-12);
        REQUIRE_MSG(rel < 1e-4, "jacobian relative error " + std::to_string(rel));
    }
    detail = "100 monotone traces, 100 jacobian checkpoints";
    return true;
}

// 5. Reliability truth table: all 8 trigger combinations produce R exactly,
//    boundary values included, plus the documented delta-r extension.
bool criterion_truth_table(std::string& detail) {
    const GatingThresholds th;
    for (int rep = 0; rep < 2; ++rep) {
        for (int gn = 0; gn < 2; ++gn) {
            for (int prox = 0; prox < 2; ++prox) {
                const double e_rep = rep ? th.tau_rep + 0.25 : th.tau_rep;  // boundary stays ok
                const double r_gn = gn ? th.tau_r + 0.25 : th.tau_r;
                const double gamma = prox ? th.tau_gamma + 0.5 : th.tau_gamma;
                const ReliabilityReport r =
                    evaluate(e_rep, ResidualTrace{{r_gn}}, gamma, th);
                REQUIRE_MSG(r.rep_trigger == (rep == 1), "rep trigger wrong in a cell");
                REQUIRE_MSG(r.gn_trigger == (gn == 1), "gn trigger wrong in a cell");
                REQUIRE_MSG(r.prox_trigger == (prox == 1), "prox trigger wrong in a cell");
                REQUIRE_MSG(r.reliable == (rep == 0 && gn == 0 && prox == 0),
                            "R does not match the conjunction");
            }
        }
    }
    // Delta-r extension: stall above the floor fires, stall below it does not.
    const ReliabilityReport stall = evaluate(0.5, ResidualTrace{{1.0, 0.9999}}, 1.0, th);
    REQUIRE_MSG(stall.gn_trigger && !stall.reliable, "delta-r stall did not fire");
    const ReliabilityReport tiny = evaluate(0.1, ResidualTrace{{0.2, 0.19999}}, 1.0, th);
    REQUIRE_MSG(!tiny.gn_trigger && tiny.reliable, "sub-floor stall fired");
    detail = "8 cells exact at boundaries, delta-r extension covered";
    return true;
}

// 6. Gating algebra: alpha = 1 equals ungated within 1e-12; alpha = 1e-8
//    stays within 1e-5 of prev_executed; Reject returns prev_target exactly.
bool criterion_gating_algebra(std::string& detail) {
    Rng rng(9006);
    ReliabilityReport bad;
    bad.reliable = false;
    for (int i = 0; i < 200; ++i) {
        const Pose prev_exec = random_pose(rng);
        const Pose prev_target = random_pose(rng);
        const Pose new_target = apply_delta(prev_exec, random_delta(rng, 3.0, 400.0));

        GatingThresholds th_full;
        th_full.alpha = 1.0;
        const auto [full, full_decision] = gate(bad, prev_exec, prev_target, new_target, th_full);
        REQUIRE_MSG((full.translation - new_target.translation).norm() < 1e-12 * 400.0 &&
                        rotation_angle_rad(full.rotation, new_target.rotation) < 1e-12,
                    "alpha=1 does not reproduce the ungated output");
        REQUIRE_MSG(full_decision.kind == GatingDecision::Kind::Scaled, "alpha=1 decision kind");

        GatingThresholds th_tiny;
        th_tiny.alpha = 1e-8;
        const auto [near, near_decision] = gate(bad, prev_exec, prev_target, new_target, th_tiny);
        REQUIRE_MSG((near.translation - prev_exec.translation).norm() < 1e-5 &&
                        rotation_angle_rad(near.rotation, prev_exec.rotation) < 1e-5,
                    "alpha->0 does not converge to prev_executed");

        GatingThresholds th_reject;
        th_reject.strategy = GatingStrategy::Reject;
        const auto [kept, kept_decision] = gate(bad, prev_exec, prev_target, new_target, th_reject);
        REQUIRE_MSG(kept.translation == prev_target.translation &&
                        kept.rotation.quaternion().coeffs() ==
                            prev_target.rotation.quaternion().coeffs(),
                    "Reject does not return prev_target exactly");
        REQUIRE_MSG(kept_decision.kind == GatingDecision::Kind::Rejected, "Reject decision kind");
    }
    detail = "200 random gate configurations";
    return true;
}

// 7. End-to-end exactness: zero-noise sweep over the full paper grid
//    succeeds on 100% of trials with pos_err < 1e-3 mm (both modes).
bool criterion_end_to_end(std::string& detail) {
    const EpnpGaussNewtonEstimator estimator;
    const GatingThresholds th;
    const auto grid = paper_grid({200.0, 400.0, 600.0, 800.0, 1000.0}, 20, 9007, 0.0,
                                 {GatingMode::Off, GatingMode::On});
    const auto outcomes =
        run_sweep(grid, estimator, th, default_box_target(), Intrinsics{});
    REQUIRE_MSG(outcomes.size() == 600, "expected 15 x 20 x 2 trials");
    double worst = 0.0;
    for (const auto& o : outcomes) {
        REQUIRE_MSG(o.success, "a zero-noise trial failed");
        worst = std::max(worst, o.pos_err_mm);
    }
    REQUIRE_MSG(worst < 1e-3, "worst pos_err " + std::to_string(worst) + " mm");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "600/600 success, worst pos_err %.2e mm", worst);
    detail = buf;
    return true;
}

// 8. Depth trend: sigma = 1 px, >= 500 trials per depth, ungated success
//    rate non-increasing in depth allowing one adjacent inversion of <= 3
//    percentage points; < 60 s.
bool criterion_depth_trend(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const EpnpGaussNewtonEstimator estimator;
    const GatingThresholds th;
    const std::vector<double> depths{200.0, 400.0, 600.0, 800.0, 1000.0};
    const auto grid = paper_grid(depths, 167, 9008, 1.0, {GatingMode::Off});  // 501 per depth
    const auto outcomes =
        run_sweep(grid, estimator, th, default_box_target(), Intrinsics{});

    std::map<double, std::pair<int, int>> tally;  // depth -> (success, total)
    for (const auto& o : outcomes) {
        auto& [succ, total] = tally[o.depth_mm];
        succ += o.success ? 1 : 0;
        ++total;
    }
    std::vector<double> rates;
    std::ostringstream rates_text;
    for (double depth : depths) {
        const auto [succ, total] = tally.at(depth);
        REQUIRE_MSG(total >= 500, "fewer than 500 trials at a depth");
        rates.push_back(100.0 * succ / total);
        rates_text << (rates.size() > 1 ? " " : "") << rates.back();
    }
    int inversions = 0;
    for (std::size_t i = 1; i < rates.size(); ++i) {
        if (rates[i] > rates[i - 1]) {
            ++inversions;
            REQUIRE_MSG(rates[i] - rates[i - 1] <= 3.0,
                        "adjacent inversion above 3 percentage points");
        }
    }
    REQUIRE_MSG(inversions <= 1, "more than one adjacent inversion");
    const double elapsed = seconds_since(start);
    REQUIRE_MSG(elapsed < 60.0, "exceeded 60 s budget");
    detail = "success rates [" + rates_text.str() + "] in " + std::to_string(elapsed) + " s";
    return true;
}

// 9. Gating benefit on paired seeds, depth >= 600 mm, default thresholds:
//    gated P95 <= ungated P95 and gated max <= ungated max; >= 1000 paired
//    trials; < 120 s.
bool criterion_gating_benefit(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const EpnpGaussNewtonEstimator estimator;
    const GatingThresholds th;
    const auto grid = paper_grid({600.0, 800.0, 1000.0}, 112, 9009, 1.0,
                                 {GatingMode::Off, GatingMode::On});  // 1008 pairs
    const auto outcomes =
        run_sweep(grid, estimator, th, default_box_target(), Intrinsics{});

    std::vector<TrialOutcome> off, on;
    for (const auto& o : outcomes) {
        (o.mode == GatingMode::On ? on : off).push_back(o);
    }
    REQUIRE_MSG(off.size() >= 1000 && off.size() == on.size(), "pairing size mismatch");
    const MetricsSummary s_off = summarize(off);
    const MetricsSummary s_on = summarize(on);
    REQUIRE_MSG(s_on.pos_p95_mm <= s_off.pos_p95_mm, "gated P95 exceeds ungated P95");
    REQUIRE_MSG(s_on.pos_max_mm <= s_off.pos_max_mm, "gated max exceeds ungated max");
    const double elapsed = seconds_since(start);
    REQUIRE_MSG(elapsed < 120.0, "exceeded 120 s budget");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "P95 %.2f -> %.2f mm, max %.2f -> %.2f mm (%zu pairs, %.2f s)",
                  s_off.pos_p95_mm, s_on.pos_p95_mm, s_off.pos_max_mm, s_on.pos_max_mm, off.size(),
                  elapsed);
    detail = buf;
    return true;
}

// 10. Selectivity: default-threshold gated fraction over the standard grid
//     lies in [5%, 40%]; trigger-union bounds hold exactly.
bool criterion_selectivity(std::string& detail) {
    const EpnpGaussNewtonEstimator estimator;
    const GatingThresholds th;
    const auto grid = paper_grid({200.0, 400.0, 600.0, 800.0, 1000.0}, 20, 9010, 1.0,
                                 {GatingMode::On});  // standard grid, 300 trials
    const auto outcomes =
        run_sweep(grid, estimator, th, default_box_target(), Intrinsics{});
    REQUIRE_MSG(outcomes.size() == 300, "expected the 300-trial standard grid");

    TriggerStats stats;
    for (const auto& o : outcomes) stats = accumulate(stats, o.report);
    const double fraction =
        100.0 * static_cast<double>(stats.gated_union_count) / static_cast<double>(stats.total_trials);
    REQUIRE_MSG(fraction >= 5.0 && fraction <= 40.0,
                "gated fraction " + std::to_string(fraction) + "% outside [5, 40]");
    const std::uint64_t max_single = std::max({stats.rep_count, stats.gn_count, stats.prox_count});
    REQUIRE_MSG(max_single <= stats.gated_union_count, "union below a single criterion count");
    REQUIRE_MSG(stats.gated_union_count <= stats.rep_count + stats.gn_count + stats.prox_count,
                "union above the criterion sum");
    REQUIRE_MSG(stats.gated_union_count <= stats.total_trials, "union above the trial count");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "union %llu/300 (%.1f%%), rep %llu gn %llu prox %llu",
                  static_cast<unsigned long long>(stats.gated_union_count), fraction,
                  static_cast<unsigned long long>(stats.rep_count),
                  static_cast<unsigned long long>(stats.gn_count),
                  static_cast<unsigned long long>(stats.prox_count));
    detail = buf;
    return true;
}

// 11. Determinism: two sweeps with identical config and seed produce
//     byte-identical record files; reports over them are byte-identical.
bool criterion_determinism(std::string& detail) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "posegate_acceptance";
    fs::create_directories(dir);
    const fs::path config_path = dir / "config.json";
    {
        RunConfig c;
        c.depths_mm = {200.0, 600.0, 1000.0};
        c.off_axes_mm = {0.0, 100.0};
        c.repeats = 3;
        c.base_seed = 20260810;
        std::ofstream out(config_path);
        out << config_to_json(c).dump(2) << '\n';
    }
    const fs::path rec_a = dir / "a.ndjson";
    const fs::path rec_b = dir / "b.ndjson";
    std::ostringstream diag;
    REQUIRE_MSG(cli::cmd_sweep(config_path.string(), rec_a.string(), "off,on", std::nullopt,
                               diag) == cli::kExitOk,
                "first sweep failed");
    REQUIRE_MSG(cli::cmd_sweep(config_path.string(), rec_b.string(), "off,on", std::nullopt,
                               diag) == cli::kExitOk,
                "second sweep failed");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    REQUIRE_MSG(slurp(rec_a) == slurp(rec_b), "record files differ");

    for (const char* format : {"md", "csv", "json"}) {
        std::ostringstream out_a, out_b;
        REQUIRE_MSG(cli::cmd_report(rec_a.string(), format, "", out_a, diag) == cli::kExitOk,
                    "report failed");
        REQUIRE_MSG(cli::cmd_report(rec_b.string(), format, "", out_b, diag) == cli::kExitOk,
                    "report failed");
        REQUIRE_MSG(out_a.str() == out_b.str(), std::string("reports differ for ") + format);
    }
    detail = "byte-identical records and md/csv/json reports";
    return true;
}

// 12. Metrics oracle: summarize matches an independent brute-force pass
//     within 1e-12 relative on 100 random outcome lists; nearest-rank P95 of
//     [1..100] = 95.
bool criterion_metrics(std::string& detail) {
    Rng rng(9012);
    for (int list = 0; list < 100; ++list) {
        const int n = 1 + static_cast<int>(rng.uniform(0.0, 80.0));
        std::vector<TrialOutcome> outcomes;
        std::vector<double> pos;
        int successes = 0;
        for (int i = 0; i < n; ++i) {
            TrialOutcome o;
            o.pos_err_mm = rng.uniform(0.0, 50.0);
            o.ori_err_deg = rng.uniform(0.0, 10.0);
            o.success = rng.uniform() < 0.7;
            successes += o.success ? 1 : 0;
            pos.push_back(o.pos_err_mm);
            outcomes.push_back(o);
        }
        const MetricsSummary s = summarize(outcomes);

        double mean = 0.0;
        for (double v : pos) mean += v;
        mean /= n;
        double stddev = 0.0;
        if (n > 1) {
            double acc = 0.0;
            for (double v : pos) acc += (v - mean) * (v - mean);
            stddev = std::sqrt(acc / (n - 1));
        }
        std::vector<double> sorted = pos;
        std::sort(sorted.begin(), sorted.end());
        std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * n));
        if (rank == 0) rank = 1;
        const double p95 = sorted[rank - 1];
        const double rate = 100.0 * successes / n;

        REQUIRE_MSG(std::abs(s.pos_mean_mm - mean) <= 1e-12 * std::max(1.0, mean),
                    "mean deviates from the oracle");
        REQUIRE_MSG(std::abs(s.pos_std_mm - stddev) <= 1e-12 * std::max(1.0, stddev),
                    "std deviates from the oracle");
        REQUIRE_MSG(s.pos_p95_mm == p95, "p95 deviates from the oracle");
        REQUIRE_MSG(s.pos_max_mm == sorted.back(), "max deviates from the oracle");
        REQUIRE_MSG(std::abs(s.success_rate_pct - rate) <= 1e-12 * 100.0,
                    "success rate deviates from the oracle");
    }
    std::vector<TrialOutcome> ladder;
    for (int i = 1; i <= 100; ++i) {
        TrialOutcome o;
        o.pos_err_mm = i;
        o.ori_err_deg = 0.0;
        o.success = true;
        ladder.push_back(o);
    }
    REQUIRE_MSG(summarize(ladder).pos_p95_mm == 95.0, "nearest-rank p95 of 1..100 is not 95");
    detail = "100 random lists vs brute force, ladder p95 = 95";
    return true;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "SE(3) algebra properties", criterion_se3},
        {2, "reprojection score vs brute-force oracle", criterion_reprojection},
        {3, "EPnP noiseless exactness", criterion_epnp},
        {4, "Gauss-Newton traces and jacobian", criterion_gauss_newton},
        {5, "reliability truth table", criterion_truth_table},
        {6, "gating algebra", criterion_gating_algebra},
        {7, "end-to-end zero-noise exactness", criterion_end_to_end},
        {8, "success-rate depth trend", criterion_depth_trend},
        {9, "gating tail-risk benefit", criterion_gating_benefit},
        {10, "gating selectivity", criterion_selectivity},
        {11, "sweep and report determinism", criterion_determinism},
        {12, "metrics vs brute-force oracle", criterion_metrics},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", criterion.id,
                    criterion.name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
    }
    return failures;
}
