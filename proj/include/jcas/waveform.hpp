#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "jcas/types.hpp"

namespace jcas {

struct Schedule;

/// OFDM grid constants. Defaults are the 60 GHz / 2048-point setup.
struct WaveformConfig {
    std::size_t n_fft = 2048;
    std::size_t m_codes = 4;
    std::size_t n_cp = 512;
    double scs_hz = 60e3;
    double carrier_hz = 60e9;
    /// Amplitude scale of the implanted sensing term (1 = verbatim).
    double sensing_scale = 1.0;

    /// Throws std::invalid_argument when the grid is inconsistent.
    void validate() const;

    std::size_t occasion_len() const { return n_fft / m_codes; }
    std::size_t symbol_len() const { return n_fft + n_cp; }
    /// Occasions taken by the CP in front of each FSI symbol.
    std::size_t cp_occasions() const { return n_cp / occasion_len(); }
    double t_s() const { return 1.0 / (static_cast<double>(n_fft) * scs_hz); }
    double bandwidth_hz() const { return static_cast<double>(n_fft) * scs_hz; }
    double t_chirp() const { return static_cast<double>(occasion_len()) * t_s(); }
    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
    /// Range covered by one fast-time bin.
    double range_bin_m() const { return kSpeedOfLight * t_s() / 2.0; }
};

struct ChirpSpec {
    double f0_hz = 0.0;
    double kc_hz_per_s = 0.0;
    std::size_t length = 0;

    /// Sweep from -B/2 to B/2 over one occasion.
    static ChirpSpec standard(const WaveformConfig& cfg);
};

/// x[n] = exp(j2pi(f0 n t_s + kc n^2 t_s^2 / 2)).
cvec make_chirp(const ChirpSpec& spec, double t_s);

/// M shifted copies of the tiled chirp: row m = tile(chirp, M) * e^{j2pi m n/N}.
struct BaseSet {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<cvec> rows;
};

BaseSet make_base_set(const WaveformConfig& cfg, std::span<const cplx> chirp);

/// u[m][k] = e^{-j2pi mk/M} e^{-jpi k/M} / sqrt(M).
class CodeMatrix {
public:
    CodeMatrix() = default;
    CodeMatrix(std::size_t m, cvec entries);

    std::size_t size() const { return m_; }
    cplx operator()(std::size_t row, std::size_t col) const { return u_[row * m_ + col]; }
    cplx& operator()(std::size_t row, std::size_t col) { return u_[row * m_ + col]; }

    /// max |(U U^H - I)_{ij}|
    double unitarity_error() const;

private:
    std::size_t m_ = 0;
    cvec u_;
};

CodeMatrix make_code_matrix(std::size_t m);

/// b[m] = sum_i u[m][i] * base.rows[i]
struct SensingWaveforms {
    std::vector<cvec> b;
};

SensingWaveforms make_sensing_waveforms(const BaseSet& base, const CodeMatrix& codes);

/// Frequency-domain OFDM symbol, grouped as N/M groups of M subcarriers.
struct FreqGrid {
    std::size_t m = 0;
    cvec s;

    std::size_t groups() const { return m == 0 ? 0 : s.size() / m; }
    cplx at(std::size_t group, std::size_t k) const { return s[group * m + k]; }
};

/// s[gM + k] = scale*sqrt(M)*P[g]*u[m][k] + sum_{i != m} d_i[g]*u[i][k].
/// `data` holds the M-1 data vectors in ascending code order, skipping
/// `sensing_code`.
FreqGrid spread_and_assemble(const WaveformConfig& cfg, std::size_t sensing_code,
                             std::span<const cplx> chirp_spectrum,
                             const std::vector<cvec>& data, const CodeMatrix& codes);

/// Per-symbol rotation e^{j2pi k/M}, or 1 when rotation is off.
cplx symbol_rotation(std::size_t symbol_index, std::size_t m, bool rotate);

/// CP + body, body = idft(s) * rotation.
cvec assemble_symbol(const FreqGrid& grid, const WaveformConfig& cfg, std::size_t symbol_index,
                     bool rotate);

/// Everything derived from a WaveformConfig that the transmitter and the
/// sensing receiver share.
struct WaveformBank {
    WaveformConfig cfg;
    cvec chirp;
    cvec chirp_spectrum;  // unitary L-point DFT of chirp
    CodeMatrix codes;
    BaseSet base;
    SensingWaveforms sensing;

    explicit WaveformBank(const WaveformConfig& config);
};

enum class FrameKind { Fsi, Rtd };

struct Frame {
    FrameKind kind = FrameKind::Fsi;
    /// N + N_CP for FSI symbols, L for RTD slots.
    std::size_t unit_len = 0;
    /// K for FSI, M*K for RTD.
    std::size_t units = 0;
    cvec samples;
    /// Rotation applied to each FSI symbol (all 1 unless FsiTail).
    cvec rotations;
    /// Data symbols carried by the frame, in transmission order.
    cvec payload;
};

/// Number of QPSK data symbols the frame carries for this schedule.
std::size_t payload_capacity(const WaveformConfig& cfg, const Schedule& schedule);

/// FSI: K symbols, code alpha_k carries the chirp, the other M-1 codes carry
/// payload. RTD-family: M*K slots, chirp in scheduled slots, L-point CP-less
/// OFDM data elsewhere. Throws std::invalid_argument on payload size mismatch.
Frame assemble_frame(const WaveformBank& bank, const Schedule& schedule,
                     std::span<const cplx> payload);

}  // namespace jcas
