#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jcas/rd_matrix.hpp"
#include "jcas/waveform.hpp"

namespace jcas {

enum class MapTag { Single, Near, Far };

std::string_view to_string(MapTag tag);

struct Detection {
    double range_m = 0.0;
    double velocity_kmh = 0.0;
    /// Peak power over the reference maximum, in (0, 1].
    double normalized_power = 0.0;
    Cell cell;
    MapTag map = MapTag::Single;
};

struct PeakOptions {
    double rel_threshold = 0.05;
    std::size_t max_peaks = 8;
    std::size_t guard = 2;
};

struct Physical {
    double range_m = 0.0;
    double velocity_kmh = 0.0;
};

/// Cell -> (range, velocity). The far flag adds L range bins.
Physical cell_to_physical(const Cell& cell, const WaveformConfig& cfg, std::size_t g_total, bool far_offset);

/// Nearest cell of a physical (range, velocity); range beyond L bins wraps.
Cell physical_to_cell(double range_m, double velocity_kmh, const WaveformConfig& cfg, std::size_t g_total);

/// Local maxima over a (2 guard + 1)^2 neighbourhood (Doppler wraps)
/// exceeding rel_threshold * reference power, strongest first; ties go to
/// the lower range bin, then the lower Doppler bin. The reference defaults
/// to the map's own maximum. Throws std::invalid_argument on an empty map.
std::vector<Detection> find_peaks(const RdMatrix& rd, const WaveformConfig& cfg, const PeakOptions& options,
                                  MapTag tag = MapTag::Single, std::optional<double> reference_power = {});

/// Detections over several maps normalised by their joint maximum (used for
/// the near/far pair).
std::vector<Detection> find_peaks_joint(std::span<const RdMatrix* const> maps, std::span<const MapTag> tags,
                                        const WaveformConfig& cfg, const PeakOptions& options);

struct TruthCell {
    Cell cell;
    MapTag map = MapTag::Single;
};

struct MatchedPair {
    std::size_t truth = 0;
    std::size_t detection = 0;
    long range_error = 0;
    long doppler_error = 0;
};

struct EvalReport {
    std::vector<MatchedPair> matched;
    std::vector<std::size_t> misses;        // truth indices
    std::vector<std::size_t> false_alarms;  // detection indices
    /// min matched peak power / max power outside every truth neighbourhood.
    double peak_to_interference_db = 0.0;
};

/// Greedy nearest matching within tol bins per axis (Doppler distance wraps).
EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<TruthCell>& truth, const RdMatrix& rd,
                    std::size_t tol_range = 1, std::size_t tol_doppler = 1);

}  // namespace jcas
