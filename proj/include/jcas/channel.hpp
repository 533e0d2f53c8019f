#pragma once

#include <vector>

#include "jcas/rng.hpp"
#include "jcas/waveform.hpp"

namespace jcas {

struct Target {
    double range_m = 0.0;
    /// Positive = approaching.
    double velocity_mps = 0.0;
    double amplitude = 1.0;
};

struct ChannelConfig {
    double si_over_echo_db = 100.0;
    double echo_snr_db = -10.0;
    bool si_enabled = true;
    bool noise_enabled = true;
    /// Off: delays rounded to whole samples.
    bool fractional_delay = false;

    double si_amplitude() const;
};

struct DelayDoppler {
    double delay_samples = 0.0;
    double doppler_hz = 0.0;
};

/// Two-way delay in samples and Doppler 2v/lambda.
DelayDoppler target_to_delay_doppler(const Target& t, double carrier_hz, double t_s);

/// rx[n] = A_si tx[n] + sum_t a_t tx[n - d_t] e^{j2pi f_t n t_s} + w[n].
///
/// SI and noise are scaled against the strongest target's echo (amplitude
/// 1 when there are no targets): A_si = a_max 10^(si_db/20), noise variance
/// a_max^2 mean|tx|^2 / 10^(snr/10). Samples delayed past the frame end are
/// dropped; the leading gap is zero.
Frame synthesize_rx(const Frame& tx, const std::vector<Target>& targets, const ChannelConfig& cc,
                    const WaveformConfig& cfg, Rng& rng);

/// Echo of a single target alone (no SI, no noise).
cvec echo_component(const cvec& tx, const Target& target, const ChannelConfig& cc,
                    const WaveformConfig& cfg);

}  // namespace jcas
