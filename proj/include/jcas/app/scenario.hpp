#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "jcas/channel.hpp"
#include "jcas/detect.hpp"
#include "jcas/receiver.hpp"
#include "jcas/scheduler.hpp"
#include "jcas/waveform.hpp"

namespace jcas::app {

/// Thrown for anything wrong with a scenario file (maps to exit code 2).
class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TargetSpec {
    double range_m = 0.0;
    double velocity_kmh = 0.0;
    double amplitude = 1.0;
};

struct DetectionSpec {
    PeakOptions peaks;
    std::size_t tol_range = 1;
    std::size_t tol_doppler = 1;
    /// FsiTail only: zero the neighbourhood of each window's peaks before the solve.
    bool cleanup = false;
    std::size_t cleanup_radius = 2;
};

struct CommsSpec {
    bool enabled = false;
    /// Es/N0 per data symbol.
    double snr_db = 10.0;
};

struct Scenario {
    /// Optional prefix for artifact tags.
    std::string name;
    std::uint64_t seed = 1;
    WaveformConfig waveform;
    Scheme scheme = Scheme::RTD;
    std::size_t k = 80;
    bool rtd_one_per_group = false;
    /// Explicit alpha list (FSI) or slot list (RTD family); drawn from the seed when absent.
    std::optional<std::vector<std::size_t>> schedule;
    std::vector<TargetSpec> targets;
    ChannelConfig channel;
    SensingOptions receiver;
    double cond_limit = 1e6;
    DetectionSpec detection;
    CommsSpec comms;
};

/// Parses and validates; unknown keys are rejected. Missing keys take the
/// 60 GHz defaults (K = 80 for the TDM schemes, 64 for FSI).
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

/// Fully resolved form; scenario_from_json(scenario_to_json(s)) == s.
nlohmann::json scenario_to_json(const Scenario& s);

std::string_view to_string(AdcPlacement p);

}  // namespace jcas::app
