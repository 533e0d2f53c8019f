#include "jcas/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jcas/dft.hpp"

namespace jcas {

double ChannelConfig::si_amplitude() const { return std::pow(10.0, si_over_echo_db / 20.0); }

DelayDoppler target_to_delay_doppler(const Target& t, double carrier_hz, double t_s) {
    if (!(carrier_hz > 0.0)) throw std::invalid_argument("target_to_delay_doppler: carrier must be > 0");
    const double lambda = kSpeedOfLight / carrier_hz;
    return {2.0 * t.range_m / kSpeedOfLight / t_s, 2.0 * t.velocity_mps / lambda};
}

namespace {

cvec integer_shift(const cvec& tx, std::size_t delay) {
    cvec out(tx.size(), 0.0);
    for (std::size_t n = delay; n < tx.size(); ++n) out[n] = tx[n - delay];
    return out;
}

// Linear (not circular) fractional shift: zero-pad, apply the phase ramp,
// truncate back to the frame length.
cvec fractional_shift(const cvec& tx, double delay) {
    std::size_t padded = tx.size() + static_cast<std::size_t>(std::ceil(delay)) + 64;
    cvec buf(padded, 0.0);
    std::copy(tx.begin(), tx.end(), buf.begin());
    cvec spec = unitary_dft(buf);
    const double nd = static_cast<double>(padded);
    for (std::size_t k = 0; k < padded; ++k) {
        // signed frequency index keeps the interpolant band-limited
        const double kk = k < (padded + 1) / 2 ? static_cast<double>(k) : static_cast<double>(k) - nd;
        spec[k] *= unit_phasor(-kk * delay / nd);
    }
    cvec shifted = unitary_idft(spec);
    shifted.resize(tx.size());
    return shifted;
}

}  // namespace

cvec echo_component(const cvec& tx, const Target& target, const ChannelConfig& cc,
                    const WaveformConfig& cfg) {
    if (target.range_m < 0.0) throw std::invalid_argument("synthesize_rx: negative target range");
    const auto dd = target_to_delay_doppler(target, cfg.carrier_hz, cfg.t_s());
    cvec echo;
    if (cc.fractional_delay) {
        echo = fractional_shift(tx, dd.delay_samples);
    } else {
        echo = integer_shift(tx, static_cast<std::size_t>(std::llround(dd.delay_samples)));
    }
    const double step = dd.doppler_hz * cfg.t_s();
    for (std::size_t n = 0; n < echo.size(); ++n) {
        double cycles = step * static_cast<double>(n);
        cycles -= std::floor(cycles);
        echo[n] *= target.amplitude * unit_phasor(cycles);
    }
    return echo;
}

Frame synthesize_rx(const Frame& tx, const std::vector<Target>& targets, const ChannelConfig& cc,
                    const WaveformConfig& cfg, Rng& rng) {
    if (tx.samples.empty()) throw std::invalid_argument("synthesize_rx: empty frame");
    Frame rx = tx;
    const std::size_t n = tx.samples.size();
    double ref_amp = targets.empty() ? 1.0 : 0.0;
    for (const auto& t : targets) ref_amp = std::max(ref_amp, std::abs(t.amplitude));
    const double a_si = cc.si_enabled ? ref_amp * cc.si_amplitude() : 0.0;
    for (std::size_t i = 0; i < n; ++i) rx.samples[i] = a_si * tx.samples[i];
    for (const auto& t : targets) {
        const cvec echo = echo_component(tx.samples, t, cc, cfg);
        for (std::size_t i = 0; i < n; ++i) rx.samples[i] += echo[i];
    }
    if (cc.noise_enabled) {
        const double echo_power = energy(tx.samples) / static_cast<double>(n);
        const double variance = ref_amp * ref_amp * echo_power / std::pow(10.0, cc.echo_snr_db / 10.0);
        for (auto& x : rx.samples) x += rng.complex_normal(variance);
    }
    return rx;
}

}  // namespace jcas
