#include "jcas/comms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "jcas/dft.hpp"

namespace jcas {

cvec modulate(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("modulate: odd bit count");
    const double a = 1.0 / std::sqrt(2.0);
    cvec out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = {bits[2 * i] ? -a : a, bits[2 * i + 1] ? -a : a};
    return out;
}

std::vector<std::uint8_t> demodulate(std::span<const cplx> symbols) {
    std::vector<std::uint8_t> bits(symbols.size() * 2);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        bits[2 * i] = symbols[i].real() < 0.0 ? 1 : 0;
        bits[2 * i + 1] = symbols[i].imag() < 0.0 ? 1 : 0;
    }
    return bits;
}

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng) {
    std::vector<std::uint8_t> bits(count);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 64 == 0) word = rng.next();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

Despread despread(const FreqGrid& grid, const CodeMatrix& codes, std::size_t sensing_code) {
    const std::size_t m = codes.size();
    if (grid.m != m || grid.s.size() % m != 0) throw std::invalid_argument("despread: grid/code mismatch");
    if (sensing_code >= m) throw std::invalid_argument("despread: sensing code out of range");
    Despread out;
    out.sensing_code = sensing_code;
    const std::size_t groups = grid.groups();
    for (std::size_t i = 0; i < m; ++i) {
        cvec d(groups, 0.0);
        for (std::size_t g = 0; g < groups; ++g) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < m; ++k) acc += grid.at(g, k) * std::conj(codes(i, k));
            d[g] = acc;
        }
        out.per_code.push_back(std::move(d));
    }
    return out;
}

double qpsk_ber(double es_n0) { return 0.5 * std::erfc(std::sqrt(es_n0) / std::sqrt(2.0)); }

LinkResult run_link(const WaveformBank& bank, const Schedule& schedule, std::span<const std::uint8_t> bits,
                    cplx gain, double noise_variance, Rng& rng) {
    const WaveformConfig& cfg = bank.cfg;
    const std::size_t capacity = payload_capacity(cfg, schedule);
    if (bits.size() != 2 * capacity)
        throw std::invalid_argument("run_link: frame carries " + std::to_string(2 * capacity) + " bits, got " +
                                    std::to_string(bits.size()));
    if (std::abs(gain) == 0.0) throw std::invalid_argument("run_link: zero channel gain");
    const cvec tx_symbols = modulate(bits);
    const Frame tx = assemble_frame(bank, schedule, tx_symbols);

    cvec rx = tx.samples;
    for (auto& x : rx) {
        x *= gain;
        if (noise_variance > 0.0) x += rng.complex_normal(noise_variance);
    }

    const std::size_t l = cfg.occasion_len();
    cvec rx_symbols;
    rx_symbols.reserve(tx_symbols.size());
    if (tx.kind == FrameKind::Fsi) {
        const std::size_t s = cfg.symbol_len();
        for (std::size_t k = 0; k < tx.units; ++k) {
            std::span<const cplx> body(rx.data() + k * s + cfg.n_cp, cfg.n_fft);
            FreqGrid grid{cfg.m_codes, unitary_dft(body)};
            const cplx tap = gain * tx.rotations[k];
            for (auto& v : grid.s) v /= tap;
            const Despread ds = despread(grid, bank.codes, schedule.alpha[k]);
            for (std::size_t i = 0; i < cfg.m_codes; ++i) {
                if (i == schedule.alpha[k]) continue;
                rx_symbols.insert(rx_symbols.end(), ds.per_code[i].begin(), ds.per_code[i].end());
            }
        }
    } else {
        std::vector<bool> sensing(tx.units, false);
        for (auto slot : schedule.slots) sensing[slot] = true;
        for (std::size_t slot = 0; slot < tx.units; ++slot) {
            if (sensing[slot]) continue;
            cvec spec = unitary_dft(std::span<const cplx>(rx.data() + slot * l, l));
            for (auto& v : spec) v /= gain;
            rx_symbols.insert(rx_symbols.end(), spec.begin(), spec.end());
        }
    }

    LinkResult res;
    const auto decided = demodulate(rx_symbols);
    res.bits = bits.size();
    for (std::size_t i = 0; i < bits.size(); ++i) res.bit_errors += decided[i] != bits[i];
    res.ber = res.bits ? static_cast<double>(res.bit_errors) / static_cast<double>(res.bits) : 0.0;
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < tx_symbols.size(); ++i) {
        err += std::norm(rx_symbols[i] - tx_symbols[i]);
        ref += std::norm(tx_symbols[i]);
    }
    res.evm = ref > 0.0 ? std::sqrt(err / ref) : 0.0;
    return res;
}

}  // namespace jcas
