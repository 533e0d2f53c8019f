#include "jcas/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jcas {

std::string_view to_string(MapTag tag) {
    switch (tag) {
        case MapTag::Single: return "single";
        case MapTag::Near: return "near";
        case MapTag::Far: return "far";
    }
    return "unknown";
}

namespace {

long wrap_signed(long v, long g) {
    v = ((v % g) + g) % g;
    if (v >= g - g / 2) v -= g;
    return v;
}

}  // namespace

Physical cell_to_physical(const Cell& cell, const WaveformConfig& cfg, std::size_t g_total, bool far_offset) {
    const double d = static_cast<double>(cell.range + (far_offset ? cfg.occasion_len() : 0));
    const long nu = wrap_signed(static_cast<long>(cell.doppler), static_cast<long>(g_total));
    const double doppler_hz = static_cast<double>(nu) / (static_cast<double>(g_total) * cfg.t_chirp());
    const double v_mps = doppler_hz * cfg.wavelength_m() / 2.0;
    return {d * cfg.range_bin_m(), v_mps * 3.6};
}

Cell physical_to_cell(double range_m, double velocity_kmh, const WaveformConfig& cfg, std::size_t g_total) {
    const long l = static_cast<long>(cfg.occasion_len());
    const long d = std::lround(range_m / cfg.range_bin_m());
    const double doppler_hz = 2.0 * (velocity_kmh / 3.6) / cfg.wavelength_m();
    const long nu = std::lround(doppler_hz * static_cast<double>(g_total) * cfg.t_chirp());
    const long g = static_cast<long>(g_total);
    return {static_cast<std::size_t>(((d % l) + l) % l), static_cast<std::size_t>(((nu % g) + g) % g)};
}

std::vector<Detection> find_peaks(const RdMatrix& rd, const WaveformConfig& cfg, const PeakOptions& options,
                                  MapTag tag, std::optional<double> reference_power) {
    if (rd.values.empty()) throw std::invalid_argument("find_peaks: empty matrix");
    if (!(options.rel_threshold > 0.0 && options.rel_threshold < 1.0))
        throw std::invalid_argument("find_peaks: rel_threshold must be in (0, 1)");
    const double ref = reference_power.value_or(rd.max_power());
    std::vector<Detection> out;
    if (ref <= 0.0) return out;
    const double floor = options.rel_threshold * ref;
    const long g = static_cast<long>(rd.doppler_bins);
    const long guard = static_cast<long>(options.guard);

    for (std::size_t d = 0; d < rd.range_bins; ++d) {
        for (std::size_t nu = 0; nu < rd.doppler_bins; ++nu) {
            const double p = std::norm(rd.at(d, nu));
            if (p < floor || p <= 0.0) continue;
            bool is_max = true;
            for (long dd = -guard; dd <= guard && is_max; ++dd) {
                const long r = static_cast<long>(d) + dd;
                if (r < 0 || r >= static_cast<long>(rd.range_bins)) continue;
                for (long dv = -guard; dv <= guard; ++dv) {
                    if (dd == 0 && dv == 0) continue;
                    const auto c = static_cast<std::size_t>(((static_cast<long>(nu) + dv) % g + g) % g);
                    const double q = std::norm(rd.at(static_cast<std::size_t>(r), c));
                    // equal neighbours: the earlier cell in (d, nu) order wins
                    const bool earlier = dd < 0 || (dd == 0 && c < nu);
                    if (q > p || (q == p && earlier)) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max) continue;
            Detection det;
            det.cell = {d, nu};
            det.map = tag;
            det.normalized_power = std::min(1.0, p / ref);
            const Physical ph = cell_to_physical(det.cell, cfg, rd.doppler_bins, false);
            det.range_m = static_cast<double>(d + rd.range_offset_bins) * cfg.range_bin_m();
            det.velocity_kmh = ph.velocity_kmh;
            out.push_back(det);
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
        return a.normalized_power > b.normalized_power;
    });
    if (out.size() > options.max_peaks) out.resize(options.max_peaks);
    return out;
}

std::vector<Detection> find_peaks_joint(std::span<const RdMatrix* const> maps, std::span<const MapTag> tags,
                                        const WaveformConfig& cfg, const PeakOptions& options) {
    if (maps.size() != tags.size()) throw std::invalid_argument("find_peaks_joint: tag count");
    double ref = 0.0;
    for (const RdMatrix* m : maps) ref = std::max(ref, m->max_power());
    std::vector<Detection> all;
    for (std::size_t i = 0; i < maps.size(); ++i) {
        auto part = find_peaks(*maps[i], cfg, options, tags[i], ref);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const Detection& a, const Detection& b) {
        return a.normalized_power > b.normalized_power;
    });
    if (all.size() > options.max_peaks) all.resize(options.max_peaks);
    return all;
}

EvalReport evaluate(const std::vector<Detection>& dets, const std::vector<TruthCell>& truth, const RdMatrix& rd,
                    std::size_t tol_range, std::size_t tol_doppler) {
    EvalReport report;
    const long g = static_cast<long>(rd.doppler_bins);
    std::vector<bool> used(dets.size(), false);
    for (std::size_t t = 0; t < truth.size(); ++t) {
        long best_cost = std::numeric_limits<long>::max();
        std::size_t best = dets.size();
        MatchedPair pair{};
        for (std::size_t i = 0; i < dets.size(); ++i) {
            if (used[i] || dets[i].map != truth[t].map) continue;
            const long er = static_cast<long>(dets[i].cell.range) - static_cast<long>(truth[t].cell.range);
            const long ev = wrap_signed(static_cast<long>(dets[i].cell.doppler) -
                                            static_cast<long>(truth[t].cell.doppler), g);
            if (std::labs(er) > static_cast<long>(tol_range) || std::labs(ev) > static_cast<long>(tol_doppler))
                continue;
            const long cost = std::labs(er) + std::labs(ev);
            if (cost < best_cost) {
                best_cost = cost;
                best = i;
                pair = {t, i, er, ev};
            }
        }
        if (best == dets.size()) {
            report.misses.push_back(t);
        } else {
            used[best] = true;
            report.matched.push_back(pair);
        }
    }
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (!used[i]) report.false_alarms.push_back(i);

    // interference: strongest cell outside every truth neighbourhood
    auto near_truth = [&](std::size_t d, std::size_t nu) {
        for (const auto& tc : truth) {
            const long er = static_cast<long>(d) - static_cast<long>(tc.cell.range);
            const long ev = wrap_signed(static_cast<long>(nu) - static_cast<long>(tc.cell.doppler), g);
            if (std::labs(er) <= static_cast<long>(tol_range) && std::labs(ev) <= static_cast<long>(tol_doppler))
                return true;
        }
        return false;
    };
    double interference = 0.0;
    for (std::size_t d = 0; d < rd.range_bins; ++d)
        for (std::size_t nu = 0; nu < rd.doppler_bins; ++nu)
            if (!near_truth(d, nu)) interference = std::max(interference, std::norm(rd.at(d, nu)));
    double weakest = std::numeric_limits<double>::infinity();
    for (const auto& m : report.matched) weakest = std::min(weakest, std::norm(rd.at(dets[m.detection].cell)));
    if (report.matched.empty()) {
        report.peak_to_interference_db = -std::numeric_limits<double>::infinity();
    } else if (interference <= 0.0) {
        report.peak_to_interference_db = std::numeric_limits<double>::infinity();
    } else {
        report.peak_to_interference_db = 10.0 * std::log10(weakest / interference);
    }
    return report;
}

}  // namespace jcas
