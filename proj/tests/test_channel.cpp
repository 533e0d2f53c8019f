#include "doctest.h"

#include <cmath>

#include "jcas/channel.hpp"
#include "jcas/dft.hpp"
#include "jcas/scheduler.hpp"
#include "oracle.hpp"

using namespace jcas;

namespace {

Frame sensing_only_frame(const WaveformBank& bank, std::size_t k) {
    Rng rng(0);
    return assemble_frame(bank, make_schedule(Scheme::SensingOnly, bank.cfg.m_codes, k, rng), {});
}

}  // namespace

TEST_CASE("target_to_delay_doppler") {
    const WaveformConfig cfg;
    const auto a = target_to_delay_doppler({100.0, 0.0, 1.0}, cfg.carrier_hz, cfg.t_s());
    CHECK(a.delay_samples == doctest::Approx(81.92).epsilon(1e-12));
    CHECK(a.doppler_hz == 0.0);
    const auto b = target_to_delay_doppler({0.0, 30.0, 1.0}, cfg.carrier_hz, cfg.t_s());
    CHECK(b.doppler_hz == doctest::Approx(12000.0).epsilon(1e-12));
    CHECK_THROWS_AS(target_to_delay_doppler({1.0, 0.0, 1.0}, 0.0, cfg.t_s()), std::invalid_argument);
}

TEST_CASE("self-interference only") {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    const Frame tx = sensing_only_frame(bank, 4);
    ChannelConfig cc;
    cc.noise_enabled = false;
    Rng rng(1);
    const Frame rx = synthesize_rx(tx, {}, cc, cfg, rng);
    CHECK(cc.si_amplitude() == doctest::Approx(1e5));
    for (std::size_t n = 0; n < tx.samples.size(); ++n) CHECK(rx.samples[n] == 1e5 * tx.samples[n]);
}

TEST_CASE("integer delay echo is a pure shift") {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    const Frame tx = sensing_only_frame(bank, 3);
    ChannelConfig cc;
    cc.noise_enabled = false;
    cc.si_enabled = false;
    Rng rng(1);
    // 2 d / c / t_s = 100 samples exactly
    const double range = 100.0 * kSpeedOfLight * cfg.t_s() / 2.0;
    const Frame rx = synthesize_rx(tx, {{range, 0.0, 0.5}}, cc, cfg, rng);
    for (std::size_t n = 0; n < 100; ++n) CHECK(rx.samples[n] == cplx{});
    double worst = 0.0;
    for (std::size_t n = 100; n < tx.samples.size(); ++n)
        worst = std::max(worst, std::abs(rx.samples[n] - 0.5 * tx.samples[n - 100]));
    CHECK(worst == 0.0);

    SUBCASE("fractional path reproduces an integer shift") {
        cc.fractional_delay = true;
        const cvec frac = echo_component(tx.samples, {range, 0.0, 0.5}, cc, cfg);
        CHECK(oracle::max_abs_diff(frac, rx.samples) < 1e-9);
    }
    CHECK_THROWS_AS(echo_component(tx.samples, {-1.0, 0.0, 1.0}, cc, cfg), std::invalid_argument);
}

TEST_CASE("linearity and noise statistics") {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    const Frame tx = sensing_only_frame(bank, 8);
    ChannelConfig cc;
    cc.noise_enabled = false;
    const Target t1{123.0, 10.0, 1.0}, t2{456.0, -20.0, 0.3};
    Rng rng(0);
    const Frame both = synthesize_rx(tx, {t1, t2}, cc, cfg, rng);
    ChannelConfig echo_only = cc;
    echo_only.si_enabled = false;
    const cvec e1 = echo_component(tx.samples, t1, cc, cfg);
    const cvec e2 = echo_component(tx.samples, t2, cc, cfg);
    double worst = 0.0;
    for (std::size_t n = 0; n < tx.samples.size(); ++n)
        worst = std::max(worst, std::abs(both.samples[n] - (cc.si_amplitude() * tx.samples[n] + e1[n] + e2[n])));
    CHECK(worst < 1e-9);

    // echo SNR -10 dB: noise power is 10x the unit-echo power
    ChannelConfig noisy;
    noisy.si_enabled = false;
    Rng nrng(77);
    const Frame noise_only = synthesize_rx(tx, {}, noisy, cfg, nrng);
    const double ratio = energy(tx.samples) / energy(noise_only.samples);
    CHECK(ratio == doctest::Approx(0.1).epsilon(0.05));

    Rng again(77);
    const Frame repeat = synthesize_rx(tx, {}, noisy, cfg, again);
    CHECK(repeat.samples == noise_only.samples);
}
