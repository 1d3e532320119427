#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "posegate/cli.hpp"
#include "posegate/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Pose-estimation reliability gating toolkit and alignment simulator"};
    app.set_version_flag("--version", posegate::kArtifactVersion);
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "Run a configured sweep and write a record file");
    std::string sweep_config, sweep_out;
    std::string sweep_modes = "off,on";
    std::optional<std::uint64_t> sweep_seed;
    sweep->add_option("--config", sweep_config, "Config file (JSON)")->required();
    sweep->add_option("--out", sweep_out, "Output record file")->required();
    sweep->add_option("--modes", sweep_modes, "Gating modes to run (subset of on,off)");
    sweep->add_option("--seed", sweep_seed, "Override the config base seed");

    auto* report = app.add_subcommand("report", "Render tables from a record file");
    std::string report_records, report_format = "md", report_group;
    report->add_option("--records", report_records, "Record file from sweep")->required();
    report->add_option("--format", report_format, "Output format: csv, json, or md");
    report->add_option("--group", report_group, "Restrict grouping: depth or off_axis");

    auto* trial = app.add_subcommand("trial", "Trace a single trial through the pipeline");
    std::string trial_config;
    int trial_scenario = 0, trial_repeat = 0;
    bool trial_verbose = false;
    trial->add_option("--config", trial_config, "Config file (JSON)")->required();
    trial->add_option("--scenario", trial_scenario, "Scenario index")->required();
    trial->add_option("--repeat", trial_repeat, "Repeat index")->required();
    trial->add_flag("--verbose", trial_verbose, "Print observations and residual trace");

    auto* compare = app.add_subcommand("compare", "Paired differences between two record files");
    std::string compare_a, compare_b;
    compare->add_option("records_a", compare_a, "First record file")->required();
    compare->add_option("records_b", compare_b, "Second record file")->required();

    auto* defaults = app.add_subcommand("defaults", "Print the default config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return posegate::cli::kExitUserError;
    }

    if (sweep->parsed()) {
        return posegate::cli::cmd_sweep(sweep_config, sweep_out, sweep_modes, sweep_seed,
                                        std::cerr);
    }
    if (report->parsed()) {
        return posegate::cli::cmd_report(report_records, report_format, report_group, std::cout,
                                         std::cerr);
    }
    if (trial->parsed()) {
        return posegate::cli::cmd_trial(trial_config, trial_scenario, trial_repeat, trial_verbose,
                                        std::cout, std::cerr);
    }
    if (compare->parsed()) {
        return posegate::cli::cmd_compare(compare_a, compare_b, std::cout, std::cerr);
    }
    if (defaults->parsed()) {
        return posegate::cli::cmd_defaults(std::cout);
    }
    return posegate::cli::kExitUserError;
}
