// Command-line front end: simulate, preset, selftest, calibrate.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"

#include "jcas/app/artifacts.hpp"
#include "jcas/app/runner.hpp"
#include "jcas/app/selftest.hpp"

using namespace jcas::app;

namespace {

RunOptions make_options(std::size_t threads) {
    RunOptions o;
    o.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    if (const char* dir = std::getenv("JCAS_CACHE_DIR"); dir && *dir) o.cache_dir = dir;
    return o;
}

void print_summary(const RunResult& r) {
    const std::string label = r.scenario.name.empty() ? std::string(jcas::to_string(r.scenario.scheme)) : r.scenario.name;
    std::printf("%-14s detections %zu, matched %zu/%zu", label.c_str(), r.detections.size(),
                r.evaluation.matched.size(), r.truth.size());
    if (r.link) std::printf(", BER %.3g", r.link->ber);
    std::printf("\n");
    for (const auto& d : r.detections)
        std::printf("  %-6s %8.2f m %9.2f km/h  %.3f\n", std::string(jcas::to_string(d.map)).c_str(), d.range_m,
                    d.velocity_kmh, d.normalized_power);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-Doppler sensing simulator for OFDM frames with implanted chirps"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
    std::size_t threads = 0;
    app.add_option("--seed", seed, "Override the scenario seed");
    app.add_option("--out-dir", out_dir, "Directory for artifacts")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();

    std::string scenario_file;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario file");
    simulate->add_option("file", scenario_file, "Scenario JSON")->required();

    std::string preset;
    auto* preset_cmd = app.add_subcommand("preset", "Run a built-in preset");
    preset_cmd->add_option("name", preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));

    std::string fault;
    auto* selftest = app.add_subcommand("selftest", "Run every invariant suite");
    selftest->add_option("--inject-fault", fault, "Negative control (test mode)")
        ->check(CLI::IsMember(selftest_faults()));

    std::string calib_file;
    auto* calibrate = app.add_subcommand("calibrate", "Build or reuse the dual-window pattern");
    calibrate->add_option("file", calib_file, "Scenario JSON (fsi_tail)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    const RunOptions options = make_options(threads);
    try {
        if (*simulate) {
            Scenario sc = load_scenario(scenario_file);
            if (seed) sc.seed = *seed;
            const RunResult r = run_scenario(sc, options);
            write_maps(r, out_dir);
            write_text(std::filesystem::path(out_dir) / "report.json", r.report.dump(2) + "\n");
            write_text(std::filesystem::path(out_dir) / "timing.json", r.timing.dump(2) + "\n");
            print_summary(r);
            if (r.exit_code == kExitUnresolvable)
                std::fprintf(stderr, "%zu pattern bins are not resolvable\n", r.unresolvable_bins);
            return r.exit_code;
        }
        if (*preset_cmd) {
            std::vector<RunResult> results;
            const int code = run_preset(preset, seed, options, out_dir, &results);
            for (const auto& r : results) print_summary(r);
            std::printf("artifacts in %s\n", out_dir.c_str());
            return code;
        }
        if (*selftest) {
            SelftestOptions so;
            so.inject_fault = fault;
            so.threads = options.threads;
            const auto results = run_selftest(so);
            bool ok = true;
            for (const auto& r : results) {
                std::printf("[%s] %-28s %7.2fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                            r.detail.c_str());
                ok = ok && r.pass;
            }
            std::printf("%s\n", ok ? "selftest passed" : "selftest FAILED");
            return ok ? kExitOk : kExitFailure;
        }
        if (*calibrate) {
            Scenario sc = load_scenario(calib_file);
            if (seed) sc.seed = *seed;
            nlohmann::json summary;
            const int code = run_calibrate(sc, options, out_dir, &summary);
            std::printf("%s\n", summary.dump(2).c_str());
            return code;
        }
    } catch (const ScenarioError& e) {
        std::fprintf(stderr, "invalid scenario: %s\n", e.what());
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
