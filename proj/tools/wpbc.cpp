// SPDX-License-Identifier: Apache-2.0
//
// wpbc: trace SNR / DC-current regions of backscatter multisine waveforms.

#include "wpbc/runner.hpp"
#include "wpbc/scenario.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kSolverError = 3, kIoError = 4 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive multisine waveform design for wirelessly powered backscatter links"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t points = 0;
    bool parallel = false;

    auto* run = app.add_subcommand("run", "Trace SNR / I_DC regions for every (B, N) in a scenario");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
    auto* points_opt = run->add_option("--points", points, "Override the number of region points")
                           ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    run->add_flag("--parallel", parallel, "Solve (B, N) cells on worker threads");

    app.add_subcommand("print-default-scenario", "Print the built-in scenario");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and check a scenario file");
    validate->add_option("scenario", validate_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (app.got_subcommand("print-default-scenario")) {
            std::cout << wpbc::to_text(wpbc::default_scenario());
            return kOk;
        }
        if (app.got_subcommand("validate")) {
            const auto s = wpbc::load_scenario(validate_path);
            const auto pdp = wpbc::resolve_pdp(s);
            std::cout << "ok: " << s.bandwidths_hz.size() * s.tone_counts.size() << " cells, " << pdp.size()
                      << " taps, seed " << s.seed << "\n";
            return kOk;
        }
        wpbc::RunOptions opts;
        if (*seed_opt) opts.seed = seed;
        if (*points_opt) opts.points = points;
        opts.parallel = parallel;
        const auto summary = wpbc::run(wpbc::load_scenario(scenario_path), out_dir, opts);
        for (const auto& f : summary.files) std::cout << f.string() << "\n";
        if (summary.failed_points > 0) {
            std::cerr << "error: " << summary.failed_points << " region point(s) failed to solve\n";
            return kSolverError;
        }
        return kOk;
    } catch (const wpbc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const wpbc::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIoError;
    } catch (const wpbc::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kSolverError;
    }
}
