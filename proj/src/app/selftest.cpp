#include "jcas/app/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "jcas/app/runner.hpp"
#include "jcas/channel.hpp"
#include "jcas/comms.hpp"
#include "jcas/dft.hpp"
#include "jcas/receiver.hpp"

namespace jcas::app {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// Straight O(n^2) transform, independent of the FFT backend.
cvec slow_dft(const cvec& x) {
    const std::size_t n = x.size();
    cvec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) acc += x[t] * unit_phasor(-static_cast<double>((k * t) % n) / static_cast<double>(n));
        out[k] = acc / std::sqrt(static_cast<double>(n));
    }
    return out;
}

double max_diff(const cvec& a, const cvec& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

struct Context {
    SelftestOptions options;
    CodeMatrix codes(std::size_t m) const {
        CodeMatrix u = make_code_matrix(m);
        if (options.inject_fault == "unitarity") u(0, 0) += 1e-3;
        return u;
    }
};

CheckResult rng_reference(const Context&) {
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next();
    return {"rng_reference", v == 9981545732273789042ULL, "mt19937_64 10000th output", 0};
}

CheckResult dft_against_direct_sum(const Context&) {
    Rng rng(1);
    double worst = 0.0;
    for (std::size_t n : {16u, 60u, 512u}) {
        cvec x(n);
        for (auto& v : x) v = rng.complex_normal(1.0);
        worst = std::max(worst, max_diff(unitary_dft(x), slow_dft(x)));
        worst = std::max(worst, max_diff(unitary_idft(unitary_dft(x)), x));
    }
    return {"dft_against_direct_sum", worst < 1e-11, "max error " + fmt(worst), 0};
}

CheckResult spectral_support(const Context&) {
    Rng rng(2);
    double worst = 0.0;
    for (std::size_t n : {64u, 2048u}) {
        for (std::size_t m : {2u, 4u, 8u}) {
            WaveformConfig cfg;
            cfg.n_fft = n;
            cfg.m_codes = m;
            cfg.n_cp = n / m;
            cvec chirp(n / m);
            for (auto& c : chirp) c = unit_phasor(rng.uniform());
            const BaseSet base = make_base_set(cfg, chirp);
            for (std::size_t r = 0; r < m; ++r) {
                const cvec s = unitary_dft(base.rows[r]);
                double off = 0.0, total = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    total += std::norm(s[k]);
                    if (k % m != r) off += std::norm(s[k]);
                }
                worst = std::max(worst, off / total);
            }
        }
    }
    return {"spectral_support", worst <= 1e-10, "worst off-grid fraction " + fmt(worst), 0};
}

CheckResult code_unitarity(const Context& ctx) {
    double worst = 0.0;
    for (std::size_t m = 1; m <= 16; ++m) worst = std::max(worst, ctx.codes(m).unitarity_error());
    return {"code_unitarity", worst <= 1e-12, "max |UU^H - I| " + fmt(worst), 0};
}

CheckResult code_shift_identity(const Context& ctx) {
    double worst = 0.0;
    for (std::size_t m : {2u, 4u, 8u}) {
        WaveformConfig cfg;
        cfg.m_codes = m;
        cfg.n_cp = cfg.n_fft / m;
        const WaveformBank bank(cfg);
        const SensingWaveforms sw = make_sensing_waveforms(bank.base, ctx.codes(m));
        const std::size_t l = cfg.occasion_len();
        for (std::size_t r = 0; r < m; ++r) {
            const cvec& b = sw.b[r];
            const cvec& next = sw.b[(r + 1) % m];
            for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(b[i] - next[(i + l) % b.size()]));
        }
    }
    return {"code_shift_identity", worst <= 1e-12, "max error " + fmt(worst), 0};
}

CheckResult despread_round_trip(const Context& ctx) {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    const CodeMatrix u = ctx.codes(cfg.m_codes);
    Rng rng(3);
    std::vector<cvec> data(cfg.m_codes - 1, cvec(cfg.occasion_len()));
    for (auto& d : data)
        for (auto& x : d) x = rng.complex_normal(1.0);
    const FreqGrid g = spread_and_assemble(cfg, 2, bank.chirp_spectrum, data, u);
    const Despread ds = despread(FreqGrid{cfg.m_codes, unitary_dft(unitary_idft(g.s))}, u, 2);
    double worst = 0.0;
    std::size_t slot = 0;
    for (std::size_t i = 0; i < cfg.m_codes; ++i) {
        if (i == 2) continue;
        worst = std::max(worst, max_diff(ds.per_code[i], data[slot++]));
    }
    return {"despread_round_trip", worst <= 1e-12, "max error " + fmt(worst), 0};
}

CheckResult si_nulling(const Context&) {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    Rng rng(4);
    const Schedule s = make_schedule(Scheme::FsiRandom, cfg.m_codes, 16, rng);
    cvec payload(payload_capacity(cfg, s));
    for (auto& x : payload) x = rng.complex_normal(1.0);
    const Frame tx = assemble_frame(bank, s, payload);
    double worst = 0.0;
    for (WindowKind w : {WindowKind::Standard, WindowKind::Shifted}) {
        const auto windows = capture_windows(tx, cfg, s.alpha.size(), w);
        for (std::size_t k = 0; k < windows.size(); ++k) {
            const cvec y = delay_and_sum(mix(windows[k], sensing_reference(bank, s, k, w)), cfg.m_codes);
            for (const auto& v : y) worst = std::max(worst, std::abs(v - y[0]) / std::abs(y[0]));
        }
    }
    return {"si_nulling", worst <= 1e-10, "max relative deviation " + fmt(worst), 0};
}

CheckResult si_residual(const Context&) {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    Rng rng(5);
    const Schedule s = make_schedule(Scheme::FsiRandom, cfg.m_codes, 64, rng);
    cvec payload(payload_capacity(cfg, s));
    for (auto& x : payload) x = rng.complex_normal(1.0);
    const Frame tx = assemble_frame(bank, s, payload);
    ChannelConfig cc;
    cc.noise_enabled = false;
    const Frame rx = synthesize_rx(tx, {}, cc, cfg, rng);
    const RdMatrix rd = process_sensing(rx, bank, s, WindowKind::Standard);
    // reference: RD peak of a unit zero-Doppler echo at bin 10, no SI
    ChannelConfig echo_only = cc;
    echo_only.si_enabled = false;
    const Target t{10.0 * cfg.range_bin_m(), 0.0, 1.0};
    const RdMatrix ref = process_sensing(synthesize_rx(tx, {t}, echo_only, cfg, rng), bank, s, WindowKind::Standard);
    const double ratio = rd.max_power() / std::norm(ref.at(10, 0));
    return {"si_residual", ratio <= 1e-8, "residual / unit echo peak " + fmt(ratio), 0};
}

CheckResult matched_filter_equivalence(const Context&) {
    const std::size_t g = 24;
    Rng rng(6);
    std::vector<cvec> profiles(g, cvec(3));
    std::vector<std::size_t> idx(g);
    for (std::size_t k = 0; k < g; ++k) {
        idx[k] = k;
        for (auto& x : profiles[k]) x = rng.complex_normal(1.0);
    }
    const RdMatrix rd = slow_time_matched_filter(profiles, idx, g, g);
    double worst = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
        for (std::size_t nu = 0; nu < g; ++nu) {
            cplx acc = 0.0;
            for (std::size_t k = 0; k < g; ++k) acc += profiles[k][d] * unit_phasor(static_cast<double>(k * nu % g) / double(g));
            worst = std::max(worst, std::abs(rd.at(d, nu) - acc / double(g)));
        }
    }
    return {"matched_filter_equivalence", worst <= 1e-12, "max error " + fmt(worst), 0};
}

CheckResult rtd_schedule(const Context&) {
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 200 && ok; ++seed) {
        Rng rng(seed);
        const Schedule s = make_schedule(Scheme::RTD, 4, 80, rng);
        ok = s.slots.size() == 80 && std::set<std::size_t>(s.slots.begin(), s.slots.end()).size() == 80 &&
             std::is_sorted(s.slots.begin(), s.slots.end()) && s.slots.back() < 320;
        Rng again(seed);
        ok = ok && make_schedule(Scheme::RTD, 4, 80, again).slots == s.slots;
    }
    return {"rtd_schedule", ok, "200 seeds: distinct, sorted, in range, reproducible", 0};
}

CheckResult pattern_calibration(const Context& ctx) {
    const WaveformConfig cfg;
    const WaveformBank bank(cfg);
    Rng rng(0);
    const Schedule s = make_schedule(Scheme::FsiTail, cfg.m_codes, 64, rng);
    const PatternTensor pat = build_pattern(bank, s, {}, ctx.options.threads);
    const double delta = pattern_spot_check(bank, s, pat, {}, 7, 3);
    const bool ok = delta <= 1e-6 && pat.unresolvable_count() == 0;
    return {"pattern_calibration", ok,
            "spot-check delta " + fmt(delta) + ", unresolvable " + std::to_string(pat.unresolvable_count()), 0};
}

CheckResult comms_loopback(const Context& ctx) {
    const WaveformConfig cfg;
    WaveformBank bank(cfg);
    bank.codes = ctx.codes(cfg.m_codes);
    Rng rng(8);
    const Schedule s = make_schedule(Scheme::FsiRandom, cfg.m_codes, 64, rng);
    const auto bits = random_bits(2 * payload_capacity(cfg, s), rng);
    const LinkResult r = run_link(bank, s, bits, std::polar(0.7, 2.0), 0.0, rng);
    return {"comms_loopback", r.bit_errors == 0 && r.evm < 1e-9,
            std::to_string(r.bits) + " bits, " + std::to_string(r.bit_errors) + " errors, EVM " + fmt(r.evm), 0};
}

CheckResult determinism(const Context&) {
    Scenario sc;
    sc.scheme = Scheme::FsiRandom;
    sc.k = 8;
    sc.seed = 11;
    sc.targets = {{150.0, 60.0, 1.0}};
    const RunResult a = run_scenario(sc, {1, {}});
    const RunResult b = run_scenario(sc, {4, {}});
    const auto& x = a.maps.front().rd.values;
    const auto& y = b.maps.front().rd.values;
    const bool same = x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(cplx)) == 0 &&
                      a.report.dump() == b.report.dump();
    return {"determinism", same, "same seed, 1 vs 4 threads", 0};
}

}  // namespace

std::vector<std::string> selftest_faults() { return {"unitarity"}; }

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
    if (!options.inject_fault.empty()) {
        const auto faults = selftest_faults();
        if (std::find(faults.begin(), faults.end(), options.inject_fault) == faults.end())
            throw std::invalid_argument("unknown fault '" + options.inject_fault + "'");
    }
    const Context ctx{options};
    using Check = std::pair<const char*, std::function<CheckResult(const Context&)>>;
    const std::vector<Check> checks{{"rng_reference", rng_reference},
                                    {"dft_against_direct_sum", dft_against_direct_sum},
                                    {"spectral_support", spectral_support},
                                    {"code_unitarity", code_unitarity},
                                    {"code_shift_identity", code_shift_identity},
                                    {"despread_round_trip", despread_round_trip},
                                    {"si_nulling", si_nulling},
                                    {"si_residual", si_residual},
                                    {"matched_filter_equivalence", matched_filter_equivalence},
                                    {"rtd_schedule", rtd_schedule},
                                    {"pattern_calibration", pattern_calibration},
                                    {"comms_loopback", comms_loopback},
                                    {"determinism", determinism}};
    std::vector<CheckResult> out;
    for (const auto& [name, check] : checks) {
        const auto start = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = check(ctx);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.name = name;
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(r);
    }
    return out;
}

}  // namespace jcas::app
