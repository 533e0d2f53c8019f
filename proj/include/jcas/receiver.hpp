#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "jcas/rd_matrix.hpp"
#include "jcas/scheduler.hpp"
#include "jcas/waveform.hpp"

namespace jcas {

/// Standard: the N body samples after the CP. Shifted: starts N_CP earlier
/// and covers the CP.
enum class WindowKind { Standard, Shifted };

struct RangeProfile {
    cvec bins;
    std::size_t symbol = 0;
    WindowKind window = WindowKind::Standard;
};

/// Where the optional ADC model sits in the sensing chain.
enum class AdcPlacement {
    None,
    /// On the raw received samples (full-duplex baseline, SI included).
    RawRx,
    /// After delay-and-sum with the DC term removed (analog cancellation).
    AfterSum,
};

struct SensingOptions {
    /// Fast-time bins [0, n_guard) are removed (ideal DC notch).
    std::size_t n_guard = 1;
    AdcPlacement adc = AdcPlacement::None;
    unsigned adc_bits = 12;
};

/// Captures `symbols` windows of length N from an FSI frame.
std::vector<cvec> capture_windows(const Frame& rx, const WaveformConfig& cfg, std::size_t symbols,
                                  WindowKind kind);

/// beat = reference * conj(window). A delay of d samples becomes a tone at
/// fast-time bin +d; a physical Doppler shows up conjugated.
cvec mix(std::span<const cplx> window, std::span<const cplx> reference);

/// out[l] = sum_q beat[qL + l], L = N/M.
cvec delay_and_sum(std::span<const cplx> beat, std::size_t m);

/// Unitary L-point DFT of a delay-and-summed beat.
RangeProfile fast_time_fft(std::span<const cplx> y);

/// fast_time_fft(y) with bins [0, n_guard) zeroed.
cvec si_filter(std::span<const cplx> y, std::size_t n_guard);

/// RD[d, nu] = 1/K sum_k profiles[k][d] e^{+j2pi g_k nu / G}, evaluated on
/// the columns inside the unambiguous band `span` (== G for full band).
RdMatrix slow_time_matched_filter(const std::vector<cvec>& profiles, std::span<const std::size_t> g,
                                  std::size_t total, std::size_t span);

/// Full sensing chain for one window kind. RTD-family frames ignore `kind`.
RdMatrix process_sensing(const Frame& rx, const WaveformBank& bank, const Schedule& schedule,
                         WindowKind kind, const SensingOptions& options = {});

/// Reference waveform the sensing receiver mixes against for FSI symbol k.
cvec sensing_reference(const WaveformBank& bank, const Schedule& schedule, std::size_t k,
                       WindowKind kind);

/// Per-cell 2x2 response of the near (delay d) and far (delay d + L)
/// hypotheses in the standard and shifted windows.
struct PatternCell {
    /// p[c][w]: hypothesis c in {near, far}, window w in {standard, shifted}.
    std::array<std::array<cplx, 2>, 2> p{};
    /// Rows: combination weights for [near, far] applied to [std, shift].
    std::array<std::array<cplx, 2>, 2> sol{};
    double cond = 0.0;
    bool resolvable = false;
    /// Inside the SI guard bins: no response, solve yields zero.
    bool guarded = false;
};

struct PatternTensor {
    std::size_t range_bins = 0;
    std::size_t doppler_bins = 0;
    std::size_t doppler_span = 0;
    double cond_limit = 1e6;
    /// [d * doppler_span + b], b = signed Doppler + span/2.
    std::vector<PatternCell> cells;

    const PatternCell& at(std::size_t d, long signed_nu) const;
    long band_doppler(std::size_t b) const { return static_cast<long>(b) - static_cast<long>(doppler_span / 2); }
    std::size_t unresolvable_count() const;
};

/// 2x2 condition number (ratio of singular values).
double condition_number(const std::array<std::array<cplx, 2>, 2>& a);

/// Calibrates the dual-window pattern for an FsiTail schedule: the RD value
/// a noiseless unit echo at (d + cL, nu) produces at cell (d, nu) of each
/// window, for the sensing-only frame. `threads` only affects speed.
PatternTensor build_pattern(const WaveformBank& bank, const Schedule& schedule,
                            const SensingOptions& options = {}, std::size_t threads = 1,
                            double cond_limit = 1e6);

struct WindowSolve {
    RdMatrix near;
    RdMatrix far;
    std::vector<Cell> flagged;
};

/// [near, far] = sol * [std, shift] per cell; the far map is offset by L bins.
WindowSolve solve_windows(const RdMatrix& rd_std, const RdMatrix& rd_shift, const PatternTensor& pat);

/// Zeroes every cell within `radius` (per axis) of each peak, except the peaks.
RdMatrix peak_cleanup(const RdMatrix& rd, std::span<const Cell> peaks, std::size_t radius = 2);

/// Uniform mid-rise quantizer applied to I and Q separately, clipped at
/// +-full_scale. bits in [4, 16].
cvec quantize(std::span<const cplx> v, unsigned bits, double full_scale);

/// Quantizer with full scale set to the largest |I| or |Q| in v.
cvec quantize_to_peak(std::span<const cplx> v, unsigned bits);

}  // namespace jcas
