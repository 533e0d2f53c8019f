#include "jcas/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "jcas/dft.hpp"

namespace jcas {

std::vector<cvec> capture_windows(const Frame& rx, const WaveformConfig& cfg, std::size_t symbols,
                                  WindowKind kind) {
    const std::size_t s = cfg.symbol_len();
    const std::size_t need = symbols * s;
    if (rx.samples.size() < need)
        throw std::invalid_argument("capture_windows: frame has " + std::to_string(rx.samples.size()) +
                                    " samples, need " + std::to_string(need));
    const std::size_t offset = kind == WindowKind::Standard ? cfg.n_cp : 0;
    std::vector<cvec> out;
    out.reserve(symbols);
    for (std::size_t k = 0; k < symbols; ++k) {
        auto first = rx.samples.begin() + static_cast<std::ptrdiff_t>(k * s + offset);
        out.emplace_back(first, first + static_cast<std::ptrdiff_t>(cfg.n_fft));
    }
    return out;
}

cvec mix(std::span<const cplx> window, std::span<const cplx> reference) {
    if (window.size() != reference.size()) throw std::invalid_argument("mix: length mismatch");
    cvec beat(window.size());
    for (std::size_t n = 0; n < window.size(); ++n) beat[n] = reference[n] * std::conj(window[n]);
    return beat;
}

cvec delay_and_sum(std::span<const cplx> beat, std::size_t m) {
    if (m == 0 || beat.size() % m != 0) throw std::invalid_argument("delay_and_sum: N not divisible by M");
    const std::size_t l = beat.size() / m;
    cvec out(l, 0.0);
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t i = 0; i < l; ++i) out[i] += beat[q * l + i];
    return out;
}

RangeProfile fast_time_fft(std::span<const cplx> y) { return {unitary_dft(y), 0, WindowKind::Standard}; }

cvec si_filter(std::span<const cplx> y, std::size_t n_guard) {
    if (n_guard < 1 || n_guard >= y.size())
        throw std::invalid_argument("si_filter: n_guard must be in [1, L)");
    cvec spec = fast_time_fft(y).bins;
    std::fill(spec.begin(), spec.begin() + static_cast<std::ptrdiff_t>(n_guard), cplx{});
    return spec;
}

RdMatrix slow_time_matched_filter(const std::vector<cvec>& profiles, std::span<const std::size_t> g,
                                  std::size_t total, std::size_t span) {
    if (profiles.size() != g.size()) throw std::invalid_argument("matched filter: |g| != K");
    if (profiles.empty()) throw std::invalid_argument("matched filter: no profiles");
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g[k] >= total) throw std::invalid_argument("matched filter: grid index out of range");
        if (k > 0 && g[k] <= g[k - 1])
            throw std::invalid_argument("matched filter: grid indices must be strictly increasing");
    }
    const std::size_t l = profiles.front().size();
    for (const auto& p : profiles)
        if (p.size() != l) throw std::invalid_argument("matched filter: ragged profiles");

    RdMatrix rd(l, total, span);
    // Twiddles indexed by (g * nu) mod G, so aliased columns of a uniform
    // grid come out bit-identical.
    cvec twiddle(total);
    for (std::size_t i = 0; i < total; ++i)
        twiddle[i] = unit_phasor(static_cast<double>(i) / static_cast<double>(total));
    const double inv_k = 1.0 / static_cast<double>(profiles.size());
    std::vector<cplx> weights(profiles.size());
    for (std::size_t nu = 0; nu < total; ++nu) {
        if (!rd.in_band(nu)) continue;
        for (std::size_t k = 0; k < g.size(); ++k) weights[k] = twiddle[(g[k] * nu) % total] * inv_k;
        for (std::size_t d = 0; d < l; ++d) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) acc += profiles[k][d] * weights[k];
            rd.at(d, nu) = acc;
        }
    }
    return rd;
}

cvec sensing_reference(const WaveformBank& bank, const Schedule& schedule, std::size_t k,
                       WindowKind kind) {
    const std::size_t m = bank.cfg.m_codes;
    const std::size_t code = kind == WindowKind::Standard ? schedule.alpha[k] : (schedule.alpha[k] + 1) % m;
    const cplx rho = symbol_rotation(k, m, schedule.scheme == Scheme::FsiTail);
    cvec ref = bank.sensing.b[code];
    for (auto& x : ref) x *= rho;
    return ref;
}

RdMatrix process_sensing(const Frame& rx, const WaveformBank& bank, const Schedule& schedule,
                         WindowKind kind, const SensingOptions& options) {
    const WaveformConfig& cfg = bank.cfg;
    const OccasionGrid grid = occasion_grid_indices(schedule, cfg);
    std::vector<cvec> profiles;
    profiles.reserve(grid.g.size());

    Frame quantized;
    const Frame* src = &rx;
    if (options.adc == AdcPlacement::RawRx) {
        quantized = rx;
        quantized.samples = quantize_to_peak(rx.samples, options.adc_bits);
        src = &quantized;
    }
    auto post_sum = [&](cvec y) {
        if (options.adc != AdcPlacement::AfterSum) return y;
        cplx mean = 0.0;
        for (const auto& v : y) mean += v;
        mean /= static_cast<double>(y.size());
        for (auto& v : y) v -= mean;
        return quantize_to_peak(y, options.adc_bits);
    };

    if (is_fsi(schedule.scheme)) {
        if (rx.kind != FrameKind::Fsi) throw std::invalid_argument("process_sensing: FSI schedule on RTD frame");
        const auto windows = capture_windows(*src, cfg, schedule.alpha.size(), kind);
        for (std::size_t k = 0; k < windows.size(); ++k) {
            const cvec beat = mix(windows[k], sensing_reference(bank, schedule, k, kind));
            profiles.push_back(si_filter(post_sum(delay_and_sum(beat, cfg.m_codes)), options.n_guard));
        }
    } else {
        if (rx.kind != FrameKind::Rtd) throw std::invalid_argument("process_sensing: RTD schedule on FSI frame");
        const std::size_t l = cfg.occasion_len();
        if (rx.samples.size() < schedule.m * schedule.k * l)
            throw std::invalid_argument("process_sensing: frame too short for schedule");
        for (auto slot : schedule.slots) {
            std::span<const cplx> window(src->samples.data() + slot * l, l);
            profiles.push_back(si_filter(post_sum(mix(window, bank.chirp)), options.n_guard));
        }
    }

    RdMatrix rd = slow_time_matched_filter(profiles, grid.g, grid.total, grid.doppler_span);
    rd.range_bin_m = cfg.range_bin_m();
    rd.doppler_bin_hz = 1.0 / (static_cast<double>(grid.total) * cfg.t_chirp());
    return rd;
}

const PatternCell& PatternTensor::at(std::size_t d, long signed_nu) const {
    const long b = signed_nu + static_cast<long>(doppler_span / 2);
    if (d >= range_bins || b < 0 || b >= static_cast<long>(doppler_span))
        throw std::out_of_range("PatternTensor::at");
    return cells[d * doppler_span + static_cast<std::size_t>(b)];
}

std::size_t PatternTensor::unresolvable_count() const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const PatternCell& c) {
        return !c.guarded && !c.resolvable;
    }));
}

double condition_number(const std::array<std::array<cplx, 2>, 2>& a) {
    const double fro = std::norm(a[0][0]) + std::norm(a[0][1]) + std::norm(a[1][0]) + std::norm(a[1][1]);
    const double det = std::norm(a[0][0] * a[1][1] - a[0][1] * a[1][0]);
    const double disc = std::sqrt(std::max(0.0, fro * fro - 4.0 * det));
    const double smax2 = 0.5 * (fro + disc);
    const double smin2 = 0.5 * (fro - disc);
    if (smin2 <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(smax2 / smin2);
}

namespace {

// Fills cells for band columns [b_begin, b_end).
void calibrate_columns(const WaveformBank& bank, const Schedule& schedule, const SensingOptions& options,
                       PatternTensor& pat, std::size_t b_begin, std::size_t b_end) {
    const WaveformConfig& cfg = bank.cfg;
    const std::size_t n = cfg.n_fft;
    const std::size_t l = cfg.occasion_len();
    const std::size_t m = cfg.m_codes;
    const std::size_t s = cfg.symbol_len();
    const std::size_t q = cfg.cp_occasions();
    const std::size_t k_syms = schedule.alpha.size();
    const std::size_t alpha = m - 1;
    const std::size_t g_total = pat.doppler_bins;
    const std::size_t period = g_total * l;  // phase table resolution: e^{-j2pi i/(G L)}

    // One sensing-only symbol (CP + body, no rotation).
    const std::vector<cvec> no_data(m - 1, cvec(l, 0.0));
    const cvec sym = assemble_symbol(
        spread_and_assemble(cfg, alpha, bank.chirp_spectrum, no_data, bank.codes), cfg, 0, false);

    // Mean over k >= 1 of rho_k conj(rho_{k-1}); symbol 0 has silence before it.
    cplx prev_weight = 0.0;
    for (std::size_t k = 1; k < k_syms; ++k)
        prev_weight += symbol_rotation(k, m, true) * std::conj(symbol_rotation(k - 1, m, true));
    prev_weight /= static_cast<double>(k_syms);

    cvec phase(period);
    for (std::size_t i = 0; i < period; ++i)
        phase[i] = unit_phasor(-static_cast<double>(i) / static_cast<double>(period));

    const double inv_sqrt_l = 1.0 / std::sqrt(static_cast<double>(l));
    const cvec& refs_std = bank.sensing.b[alpha];
    const cvec& refs_shift = bank.sensing.b[(alpha + 1) % m];

    cvec cur(n), prev(n);
    for (std::size_t w = 0; w < 2; ++w) {
        const std::size_t off = w == 0 ? cfg.n_cp : 0;
        const cvec& ref = w == 0 ? refs_std : refs_shift;
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t d = 0; d < l; ++d) {
                const std::size_t delay = d + c * l;
                // beat terms from the current and the previous symbol
                for (std::size_t t = 0; t < n; ++t) {
                    const long pos = static_cast<long>(off + t) - static_cast<long>(delay);
                    if (pos >= 0) {
                        cur[t] = ref[t] * std::conj(sym[static_cast<std::size_t>(pos)]);
                        prev[t] = 0.0;
                    } else {
                        cur[t] = 0.0;
                        prev[t] = ref[t] * std::conj(sym[static_cast<std::size_t>(static_cast<long>(s) + pos)]);
                    }
                }
                for (std::size_t b = b_begin; b < b_end; ++b) {
                    PatternCell& cell = pat.cells[d * pat.doppler_span + b];
                    if (d < options.n_guard) {
                        cell.guarded = true;
                        continue;
                    }
                    const long nu = pat.band_doppler(b);
                    // fast-time bin d plus within-window Doppler: (nu + d G) / (G L) cycles per sample
                    const long step_l = (nu + static_cast<long>(d * g_total)) % static_cast<long>(period);
                    const std::size_t step = static_cast<std::size_t>(step_l < 0 ? step_l + static_cast<long>(period) : step_l);
                    cplx xc = 0.0, xp = 0.0;
                    std::size_t idx = 0;
                    for (std::size_t t = 0; t < n; ++t) {
                        xc += cur[t] * phase[idx];
                        xp += prev[t] * phase[idx];
                        idx += step;
                        if (idx >= period) idx -= period;
                    }
                    // slow-time steering left over after the matched filter
                    const double lead = static_cast<double>(nu) *
                                        (static_cast<double>(q + alpha) - static_cast<double>(off) / static_cast<double>(l)) /
                                        static_cast<double>(g_total);
                    cell.p[c][w] = unit_phasor(lead) * (xc + prev_weight * xp) * inv_sqrt_l;
                }
            }
        }
    }

    for (std::size_t d = 0; d < l; ++d) {
        for (std::size_t b = b_begin; b < b_end; ++b) {
            PatternCell& cell = pat.cells[d * pat.doppler_span + b];
            if (cell.guarded) continue;
            // measurement = p^T [near, far]^T, so sol = (p^T)^{-1}
            const cplx a = cell.p[0][0], bb = cell.p[1][0], cc = cell.p[0][1], dd = cell.p[1][1];
            std::array<std::array<cplx, 2>, 2> pt{{{a, bb}, {cc, dd}}};
            cell.cond = condition_number(pt);
            cell.resolvable = std::isfinite(cell.cond) && cell.cond <= pat.cond_limit;
            if (!cell.resolvable) continue;
            const cplx det = a * dd - bb * cc;
            std::array<std::array<cplx, 2>, 2> inv{{{dd / det, -bb / det}, {-cc / det, a / det}}};
            for (auto& row : inv) {
                const double norm = std::sqrt(std::norm(row[0]) + std::norm(row[1]));
                row[0] /= norm;
                row[1] /= norm;
            }
            cell.sol = inv;
        }
    }
}

}  // namespace

PatternTensor build_pattern(const WaveformBank& bank, const Schedule& schedule, const SensingOptions& options,
                            std::size_t threads, double cond_limit) {
    if (schedule.scheme != Scheme::FsiTail) throw std::invalid_argument("build_pattern: needs an FsiTail schedule");
    if (schedule.m != bank.cfg.m_codes) throw std::invalid_argument("build_pattern: schedule M != config M");
    const std::size_t l = bank.cfg.occasion_len();
    if (2 * l > bank.cfg.symbol_len()) throw std::invalid_argument("build_pattern: far hypothesis exceeds one symbol");
    if (options.n_guard < 1 || options.n_guard >= l) throw std::invalid_argument("build_pattern: bad n_guard");
    const OccasionGrid grid = occasion_grid_indices(schedule, bank.cfg);

    PatternTensor pat;
    pat.range_bins = l;
    pat.doppler_bins = grid.total;
    pat.doppler_span = grid.doppler_span;
    pat.cond_limit = cond_limit;
    pat.cells.assign(l * grid.doppler_span, PatternCell{});

    threads = std::max<std::size_t>(1, std::min(threads, grid.doppler_span));
    if (threads == 1) {
        calibrate_columns(bank, schedule, options, pat, 0, grid.doppler_span);
        return pat;
    }
    // Disjoint column ranges; every cell is computed identically whatever the split.
    std::vector<std::thread> pool;
    const std::size_t chunk = (grid.doppler_span + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(grid.doppler_span, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] { calibrate_columns(bank, schedule, options, pat, lo, hi); });
    }
    for (auto& th : pool) th.join();
    return pat;
}

WindowSolve solve_windows(const RdMatrix& rd_std, const RdMatrix& rd_shift, const PatternTensor& pat) {
    if (rd_std.range_bins != rd_shift.range_bins || rd_std.doppler_bins != rd_shift.doppler_bins)
        throw std::invalid_argument("solve_windows: map shapes differ");
    if (rd_std.range_bins != pat.range_bins || rd_std.doppler_bins != pat.doppler_bins ||
        rd_std.doppler_span != pat.doppler_span)
        throw std::invalid_argument("solve_windows: pattern does not match the maps");
    WindowSolve out;
    out.near = RdMatrix(rd_std.range_bins, rd_std.doppler_bins, rd_std.doppler_span);
    out.far = out.near;
    for (RdMatrix* r : {&out.near, &out.far}) {
        r->range_bin_m = rd_std.range_bin_m;
        r->doppler_bin_hz = rd_std.doppler_bin_hz;
    }
    out.far.range_offset_bins = rd_std.range_bins;
    for (std::size_t d = 0; d < rd_std.range_bins; ++d) {
        for (std::size_t nu = 0; nu < rd_std.doppler_bins; ++nu) {
            if (!rd_std.in_band(nu)) continue;
            const PatternCell& cell = pat.at(d, rd_std.signed_doppler(nu));
            if (cell.guarded) continue;
            if (!cell.resolvable) {
                out.flagged.push_back({d, nu});
                continue;
            }
            const cplx s = rd_std.at(d, nu);
            const cplx h = rd_shift.at(d, nu);
            out.near.at(d, nu) = cell.sol[0][0] * s + cell.sol[0][1] * h;
            out.far.at(d, nu) = cell.sol[1][0] * s + cell.sol[1][1] * h;
        }
    }
    return out;
}

RdMatrix peak_cleanup(const RdMatrix& rd, std::span<const Cell> peaks, std::size_t radius) {
    if (radius < 1) throw std::invalid_argument("peak_cleanup: radius must be >= 1");
    RdMatrix out = rd;
    const long g = static_cast<long>(rd.doppler_bins);
    const long r = static_cast<long>(radius);
    for (const Cell& pk : peaks) {
        for (long dd = -r; dd <= r; ++dd) {
            const long d = static_cast<long>(pk.range) + dd;
            if (d < 0 || d >= static_cast<long>(rd.range_bins)) continue;
            for (long dv = -r; dv <= r; ++dv) {
                if (dd == 0 && dv == 0) continue;
                const auto nu = static_cast<std::size_t>(((static_cast<long>(pk.doppler) + dv) % g + g) % g);
                out.at(static_cast<std::size_t>(d), nu) = 0.0;
            }
        }
    }
    // a peak inside another peak's radius keeps its value
    for (const Cell& pk : peaks) out.at(pk) = rd.at(pk);
    return out;
}

cvec quantize(std::span<const cplx> v, unsigned bits, double full_scale) {
    if (bits < 4 || bits > 16) throw std::invalid_argument("quantize: bits must be in [4, 16]");
    if (!(full_scale > 0.0)) throw std::invalid_argument("quantize: full_scale must be positive");
    const double step = 2.0 * full_scale / static_cast<double>(1u << bits);
    const double top = full_scale - step / 2.0;
    auto q = [&](double x) {
        const double y = step * (std::floor(x / step) + 0.5);
        return std::clamp(y, -top, top);
    };
    cvec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = {q(v[i].real()), q(v[i].imag())};
    return out;
}

cvec quantize_to_peak(std::span<const cplx> v, unsigned bits) {
    double peak = 0.0;
    for (const auto& x : v) peak = std::max({peak, std::abs(x.real()), std::abs(x.imag())});
    if (peak == 0.0) return cvec(v.begin(), v.end());
    return quantize(v, bits, peak);
}

}  // namespace jcas
