#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jcas/rng.hpp"
#include "jcas/scheduler.hpp"
#include "jcas/waveform.hpp"

namespace jcas {

/// Gray QPSK, unit power: bit 0 -> sign of I, bit 1 -> sign of Q (0 -> +).
/// Throws std::invalid_argument on an odd bit count.
cvec modulate(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> demodulate(std::span<const cplx> symbols);

std::vector<std::uint8_t> random_bits(std::size_t count, Rng& rng);

struct Despread {
    /// Per code: d_hat_i[g] for data codes, sqrt(M) P[g] estimate for the sensing code.
    std::vector<cvec> per_code;
    std::size_t sensing_code = 0;
};

/// d_hat_i[g] = sum_k grid[gM + k] conj(u[i][k]).
Despread despread(const FreqGrid& grid, const CodeMatrix& codes, std::size_t sensing_code);

struct LinkResult {
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    double ber = 0.0;
    /// rms(error) / rms(reference), linear.
    double evm = 0.0;
};

/// Frame -> y = gain * x + w -> CP removal -> DFT -> one-tap equalization
/// with the known gain -> despread -> QPSK decisions. RTD-family frames
/// demodulate their data slots directly. `noise_variance` is per complex
/// time sample; 0 disables noise.
LinkResult run_link(const WaveformBank& bank, const Schedule& schedule, std::span<const std::uint8_t> bits,
                    cplx gain, double noise_variance, Rng& rng);

/// Closed-form QPSK BER on AWGN at Es/N0 (linear): Q(sqrt(Es/N0)).
double qpsk_ber(double es_n0);

}  // namespace jcas
