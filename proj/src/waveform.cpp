#include "jcas/waveform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "jcas/dft.hpp"
#include "jcas/scheduler.hpp"

namespace jcas {

void WaveformConfig::validate() const {
    if (m_codes < 2) throw std::invalid_argument("WaveformConfig: m_codes must be >= 2");
    if (n_fft == 0 || n_fft % m_codes != 0)
        throw std::invalid_argument("WaveformConfig: n_fft must be a positive multiple of m_codes");
    if (n_cp % occasion_len() != 0)
        throw std::invalid_argument("WaveformConfig: n_cp must be a multiple of n_fft/m_codes");
    if (n_cp > n_fft) throw std::invalid_argument("WaveformConfig: n_cp exceeds n_fft");
    if (!(scs_hz > 0.0)) throw std::invalid_argument("WaveformConfig: scs_hz must be positive");
    if (!(carrier_hz > 0.0)) throw std::invalid_argument("WaveformConfig: carrier_hz must be positive");
    if (!std::isfinite(sensing_scale)) throw std::invalid_argument("WaveformConfig: sensing_scale");
}

ChirpSpec ChirpSpec::standard(const WaveformConfig& cfg) {
    const double b = cfg.bandwidth_hz();
    return {-b / 2.0, b / cfg.t_chirp(), cfg.occasion_len()};
}

cvec make_chirp(const ChirpSpec& spec, double t_s) {
    cvec out(spec.length);
    for (std::size_t n = 0; n < spec.length; ++n) {
        const double t = static_cast<double>(n) * t_s;
        const double cycles = spec.f0_hz * t + 0.5 * spec.kc_hz_per_s * t * t;
        // keep the argument small before scaling by 2pi
        out[n] = unit_phasor(cycles - std::floor(cycles));
    }
    return out;
}

BaseSet make_base_set(const WaveformConfig& cfg, std::span<const cplx> chirp) {
    const std::size_t l = cfg.occasion_len();
    if (chirp.size() != l)
        throw std::invalid_argument("make_base_set: chirp length " + std::to_string(chirp.size()) +
                                    " != L " + std::to_string(l));
    const std::size_t n = cfg.n_fft;
    BaseSet base{cfg.m_codes, n, {}};
    for (std::size_t m = 0; m < cfg.m_codes; ++m) {
        cvec row(n);
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t turn = (m * t) % n;
            row[t] = chirp[t % l] * unit_phasor(static_cast<double>(turn) / static_cast<double>(n));
        }
        base.rows.push_back(std::move(row));
    }
    return base;
}

CodeMatrix::CodeMatrix(std::size_t m, cvec entries) : m_(m), u_(std::move(entries)) {
    if (u_.size() != m * m) throw std::invalid_argument("CodeMatrix: entry count");
}

double CodeMatrix::unitarity_error() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < m_; ++a) {
        for (std::size_t b = 0; b < m_; ++b) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < m_; ++k) acc += (*this)(a, k) * std::conj((*this)(b, k));
            worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

CodeMatrix make_code_matrix(std::size_t m) {
    if (m == 0) throw std::invalid_argument("make_code_matrix: M must be >= 1");
    const double md = static_cast<double>(m);
    const double scale = 1.0 / std::sqrt(md);
    cvec u(m * m);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t k = 0; k < m; ++k) {
            // -(rk mod M)/M - k/(2M) cycles
            const double cycles = -static_cast<double>((r * k) % m) / md - static_cast<double>(k) / (2.0 * md);
            u[r * m + k] = scale * unit_phasor(cycles);
        }
    }
    return CodeMatrix(m, std::move(u));
}

SensingWaveforms make_sensing_waveforms(const BaseSet& base, const CodeMatrix& codes) {
    if (codes.size() != base.m || base.rows.size() != base.m)
        throw std::invalid_argument("make_sensing_waveforms: shape mismatch");
    SensingWaveforms out;
    for (std::size_t m = 0; m < base.m; ++m) {
        cvec b(base.n, 0.0);
        for (std::size_t i = 0; i < base.m; ++i) {
            const cplx w = codes(m, i);
            const cvec& row = base.rows[i];
            for (std::size_t t = 0; t < base.n; ++t) b[t] += w * row[t];
        }
        out.b.push_back(std::move(b));
    }
    return out;
}

FreqGrid spread_and_assemble(const WaveformConfig& cfg, std::size_t sensing_code,
                             std::span<const cplx> chirp_spectrum,
                             const std::vector<cvec>& data, const CodeMatrix& codes) {
    const std::size_t m = cfg.m_codes;
    const std::size_t groups = cfg.occasion_len();
    if (sensing_code >= m) throw std::invalid_argument("spread_and_assemble: sensing code out of range");
    if (codes.size() != m) throw std::invalid_argument("spread_and_assemble: code matrix size");
    if (chirp_spectrum.size() != groups)
        throw std::invalid_argument("spread_and_assemble: chirp spectrum length != L");
    if (data.size() != m - 1)
        throw std::invalid_argument("spread_and_assemble: need M-1 data vectors");
    for (const auto& d : data)
        if (d.size() != groups) throw std::invalid_argument("spread_and_assemble: data vector length != L");

    FreqGrid grid{m, cvec(cfg.n_fft, 0.0)};
    const double gain = cfg.sensing_scale * std::sqrt(static_cast<double>(m));
    for (std::size_t g = 0; g < groups; ++g) {
        const cplx sensing = gain * chirp_spectrum[g];
        for (std::size_t k = 0; k < m; ++k) {
            cplx v = sensing * codes(sensing_code, k);
            std::size_t slot = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (i == sensing_code) continue;
                v += data[slot++][g] * codes(i, k);
            }
            grid.s[g * m + k] = v;
        }
    }
    return grid;
}

cplx symbol_rotation(std::size_t symbol_index, std::size_t m, bool rotate) {
    if (!rotate) return 1.0;
    return unit_phasor(static_cast<double>(symbol_index % m) / static_cast<double>(m));
}

cvec assemble_symbol(const FreqGrid& grid, const WaveformConfig& cfg, std::size_t symbol_index,
                     bool rotate) {
    const cvec body = unitary_idft(grid.s);
    const cplx rho = symbol_rotation(symbol_index, cfg.m_codes, rotate);
    const std::size_t n = body.size();
    cvec out(n + cfg.n_cp);
    for (std::size_t t = 0; t < cfg.n_cp; ++t) out[t] = rho * body[n - cfg.n_cp + t];
    for (std::size_t t = 0; t < n; ++t) out[cfg.n_cp + t] = rho * body[t];
    return out;
}

WaveformBank::WaveformBank(const WaveformConfig& config) : cfg(config) {
    cfg.validate();
    chirp = make_chirp(ChirpSpec::standard(cfg), cfg.t_s());
    chirp_spectrum = unitary_dft(chirp);
    codes = make_code_matrix(cfg.m_codes);
    base = make_base_set(cfg, chirp);
    sensing = make_sensing_waveforms(base, codes);
}

std::size_t payload_capacity(const WaveformConfig& cfg, const Schedule& schedule) {
    const std::size_t l = cfg.occasion_len();
    if (is_fsi(schedule.scheme)) return schedule.alpha.size() * (cfg.m_codes - 1) * l;
    return (schedule.m * schedule.k - schedule.slots.size()) * l;
}

Frame assemble_frame(const WaveformBank& bank, const Schedule& schedule,
                     std::span<const cplx> payload) {
    const WaveformConfig& cfg = bank.cfg;
    if (schedule.m != cfg.m_codes) throw std::invalid_argument("assemble_frame: schedule M != config M");
    const std::size_t need = payload_capacity(cfg, schedule);
    if (payload.size() != need)
        throw std::invalid_argument("assemble_frame: payload has " + std::to_string(payload.size()) +
                                    " symbols, frame carries " + std::to_string(need));
    const std::size_t l = cfg.occasion_len();
    const std::size_t m = cfg.m_codes;
    Frame frame;
    frame.payload.assign(payload.begin(), payload.end());

    if (is_fsi(schedule.scheme)) {
        const bool rotate = schedule.scheme == Scheme::FsiTail;
        const std::size_t k_syms = schedule.alpha.size();
        frame.kind = FrameKind::Fsi;
        frame.unit_len = cfg.symbol_len();
        frame.units = k_syms;
        frame.samples.reserve(k_syms * frame.unit_len);
        std::size_t cursor = 0;
        for (std::size_t k = 0; k < k_syms; ++k) {
            std::vector<cvec> data;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                data.emplace_back(payload.begin() + static_cast<std::ptrdiff_t>(cursor),
                                  payload.begin() + static_cast<std::ptrdiff_t>(cursor + l));
                cursor += l;
            }
            const FreqGrid grid = spread_and_assemble(cfg, schedule.alpha[k], bank.chirp_spectrum, data, bank.codes);
            const cvec sym = assemble_symbol(grid, cfg, k, rotate);
            frame.samples.insert(frame.samples.end(), sym.begin(), sym.end());
            frame.rotations.push_back(symbol_rotation(k, m, rotate));
        }
        return frame;
    }

    const std::size_t total = schedule.m * schedule.k;
    frame.kind = FrameKind::Rtd;
    frame.unit_len = l;
    frame.units = total;
    frame.samples.assign(total * l, 0.0);
    std::vector<bool> sensing(total, false);
    for (auto s : schedule.slots) sensing[s] = true;
    std::size_t cursor = 0;
    for (std::size_t slot = 0; slot < total; ++slot) {
        auto dst = frame.samples.begin() + static_cast<std::ptrdiff_t>(slot * l);
        if (sensing[slot]) {
            for (std::size_t t = 0; t < l; ++t) dst[static_cast<std::ptrdiff_t>(t)] = cfg.sensing_scale * bank.chirp[t];
        } else {
            const cvec body = unitary_idft(payload.subspan(cursor, l));
            cursor += l;
            std::copy(body.begin(), body.end(), dst);
        }
    }
    return frame;
}

}  // namespace jcas
