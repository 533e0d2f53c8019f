#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jcas/app/scenario.hpp"
#include "jcas/comms.hpp"
#include "jcas/detect.hpp"
#include "jcas/receiver.hpp"

namespace jcas::app {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitValidation = 2, kExitUnresolvable = 3 };

struct RunOptions {
    std::size_t threads = 1;
    /// Pattern cache directory; no caching when empty.
    std::filesystem::path cache_dir;
};

struct MapArtifact {
    std::string tag;
    RdMatrix rd;
};

struct RunResult {
    Scenario scenario;
    Schedule schedule;
    std::vector<MapArtifact> maps;
    std::vector<Detection> detections;
    std::vector<TruthCell> truth;
    /// Against the single map, or the near map stacked on top of the far map.
    EvalReport evaluation;
    std::optional<LinkResult> link;
    std::size_t unresolvable_bins = 0;
    nlohmann::json report;
    nlohmann::json timing;
    int exit_code = kExitOk;

    const RdMatrix& map(const std::string& tag) const;
};

/// Runs one scenario end to end. Results depend only on the scenario (and
/// its seed), never on options.threads.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// rd_<tag>.bin / .csv for every map.
void write_maps(const RunResult& result, const std::filesystem::path& out_dir);

/// Full simulate verb: maps, report.json, timing.json.
int run_simulate(const Scenario& scenario, const RunOptions& options, const std::filesystem::path& out_dir);

std::vector<std::string> preset_names();
/// Scenarios of a built-in preset; throws ScenarioError for unknown names.
std::vector<Scenario> preset_scenarios(const std::string& name);
/// Runs every scenario of the preset into one directory with a combined report.json.
int run_preset(const std::string& name, std::optional<std::uint64_t> seed, const RunOptions& options,
               const std::filesystem::path& out_dir, std::vector<RunResult>* results = nullptr);

/// Cache key of the calibration inputs.
std::uint64_t pattern_key(const Scenario& scenario);

struct PatternLookup {
    PatternTensor pattern;
    bool cache_hit = false;
    std::filesystem::path cache_file;
};

PatternLookup obtain_pattern(const Scenario& scenario, const WaveformBank& bank, const Schedule& schedule,
                             const RunOptions& options);

/// Largest |measured - calibrated| / max(1, |calibrated|) over a few
/// noiseless single-echo simulations.
double pattern_spot_check(const WaveformBank& bank, const Schedule& schedule, const PatternTensor& pattern,
                          const SensingOptions& sensing, std::uint64_t seed, std::size_t cells = 4);

/// calibrate verb: writes calibration.json, fills the cache.
int run_calibrate(const Scenario& scenario, const RunOptions& options, const std::filesystem::path& out_dir,
                  nlohmann::json* summary = nullptr);

}  // namespace jcas::app
