#include "jcas/app/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "jcas/app/artifacts.hpp"
#include "jcas/channel.hpp"
#include "jcas/dft.hpp"

namespace jcas::app {

using nlohmann::json;

// defined in the generated preset table
std::string preset_json(const std::string& name);
std::vector<std::string> builtin_preset_names();

namespace {

class Stopwatch {
public:
    void lap(json& timing, const char* what) {
        const auto now = std::chrono::steady_clock::now();
        timing[what] = std::chrono::duration<double>(now - last_).count();
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

Schedule resolve_schedule(const Scenario& s) {
    Schedule sched;
    if (s.schedule) {
        sched = schedule_from_list(s.scheme, s.waveform.m_codes, s.k, *s.schedule, s.rtd_one_per_group);
    } else {
        Rng rng = Rng::stream(s.seed, "schedule");
        sched = make_schedule(s.scheme, s.waveform.m_codes, s.k, rng, s.rtd_one_per_group);
    }
    sched.seed = s.seed;
    return sched;
}

std::vector<Target> physical_targets(const Scenario& s) {
    std::vector<Target> out;
    for (const auto& t : s.targets) out.push_back({t.range_m, t.velocity_kmh / 3.6, t.amplitude});
    return out;
}

std::string tag_for(const Scenario& s, const std::string& base) {
    if (s.scheme == Scheme::FsiTail) return s.name.empty() ? base : s.name + "_" + base;
    return s.name.empty() ? base : s.name;
}

// Near map rows [0, L) above far map rows [L, 2L).
RdMatrix stack_near_far(const RdMatrix& near, const RdMatrix& far) {
    RdMatrix out(near.range_bins * 2, near.doppler_bins, near.doppler_span);
    out.range_bin_m = near.range_bin_m;
    out.doppler_bin_hz = near.doppler_bin_hz;
    std::copy(near.values.begin(), near.values.end(), out.values.begin());
    std::copy(far.values.begin(), far.values.end(), out.values.begin() + static_cast<long>(near.values.size()));
    return out;
}

json cell_json(const Cell& c, const RdMatrix& rd) {
    return {{"range_bin", c.range}, {"doppler_bin", c.doppler}, {"signed_doppler_bin", rd.signed_doppler(c.doppler)}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

const RdMatrix& RunResult::map(const std::string& tag) const {
    for (const auto& m : maps)
        if (m.tag == tag) return m.rd;
    throw std::out_of_range("no map tagged '" + tag + "'");
}

std::uint64_t pattern_key(const Scenario& s) {
    std::ostringstream os;
    os.precision(17);
    os << "pattern-v1 n_fft=" << s.waveform.n_fft << " m=" << s.waveform.m_codes << " n_cp=" << s.waveform.n_cp
       << " scs=" << s.waveform.scs_hz << " fc=" << s.waveform.carrier_hz << " scale=" << s.waveform.sensing_scale
       << " k=" << s.k << " guard=" << s.receiver.n_guard << " cond=" << s.cond_limit;
    return fnv1a64(os.str());
}

PatternLookup obtain_pattern(const Scenario& scenario, const WaveformBank& bank, const Schedule& schedule,
                             const RunOptions& options) {
    PatternLookup out;
    const std::uint64_t key = pattern_key(scenario);
    if (!options.cache_dir.empty()) {
        char name[40];
        std::snprintf(name, sizeof name, "pattern_%016llx.bin", static_cast<unsigned long long>(key));
        out.cache_file = options.cache_dir / name;
        if (read_pattern(out.cache_file, key, out.pattern)) {
            out.cache_hit = true;
            return out;
        }
    }
    out.pattern = build_pattern(bank, schedule, scenario.receiver, options.threads, scenario.cond_limit);
    if (!out.cache_file.empty()) {
        std::filesystem::create_directories(options.cache_dir);
        write_pattern(out.cache_file, out.pattern, key);
    }
    return out;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    RunResult res;
    res.scenario = scenario;
    Stopwatch clock;
    const WaveformConfig& cfg = scenario.waveform;
    const WaveformBank bank(cfg);
    res.schedule = resolve_schedule(scenario);
    const Schedule& sched = res.schedule;
    const OccasionGrid grid = occasion_grid_indices(sched, cfg);
    const std::size_t l = cfg.occasion_len();

    Rng payload_rng = Rng::stream(scenario.seed, "payload");
    const cvec payload = modulate(random_bits(2 * payload_capacity(cfg, sched), payload_rng));
    const Frame tx = assemble_frame(bank, sched, payload);
    Rng noise_rng = Rng::stream(scenario.seed, "noise");
    const Frame rx = synthesize_rx(tx, physical_targets(scenario), scenario.channel, cfg, noise_rng);
    clock.lap(res.timing, "synthesis_s");

    json pattern_info;
    RdMatrix eval_map;
    if (sched.scheme == Scheme::FsiTail) {
        const PatternLookup lookup = obtain_pattern(scenario, bank, sched, options);
        clock.lap(res.timing, "calibration_s");
        const PatternTensor& pat = lookup.pattern;
        const RdMatrix rd_std = process_sensing(rx, bank, sched, WindowKind::Standard, scenario.receiver);
        const RdMatrix rd_shift = process_sensing(rx, bank, sched, WindowKind::Shifted, scenario.receiver);
        RdMatrix in_std = rd_std, in_shift = rd_shift;
        if (scenario.detection.cleanup) {
            for (RdMatrix* r : {&in_std, &in_shift}) {
                std::vector<Cell> peaks;
                for (const auto& d : find_peaks(*r, cfg, scenario.detection.peaks)) peaks.push_back(d.cell);
                *r = peak_cleanup(*r, peaks, scenario.detection.cleanup_radius);
            }
        }
        WindowSolve solved = solve_windows(in_std, in_shift, pat);
        const RdMatrix* pair[] = {&solved.near, &solved.far};
        const MapTag tags[] = {MapTag::Near, MapTag::Far};
        res.detections = find_peaks_joint(pair, tags, cfg, scenario.detection.peaks);
        res.unresolvable_bins = pat.unresolvable_count();

        double max_cond = 0.0;
        for (const auto& c : pat.cells)
            if (!c.guarded && std::isfinite(c.cond)) max_cond = std::max(max_cond, c.cond);
        json flagged = json::array();
        for (const auto& c : solved.flagged) flagged.push_back({c.range, c.doppler});
        pattern_info = {{"cache_hit", lookup.cache_hit},
                        {"max_condition_number", max_cond},
                        {"unresolvable_bins", res.unresolvable_bins},
                        {"flagged_cells", flagged}};

        for (const auto& t : scenario.targets) {
            const Cell c = physical_to_cell(t.range_m, t.velocity_kmh, cfg, grid.total);
            const long d = std::lround(t.range_m / cfg.range_bin_m());
            res.truth.push_back({c, d >= static_cast<long>(l) ? MapTag::Far : MapTag::Near});
        }
        eval_map = stack_near_far(solved.near, solved.far);
        res.maps = {{tag_for(scenario, "std"), rd_std},
                    {tag_for(scenario, "shift"), rd_shift},
                    {tag_for(scenario, "near"), std::move(solved.near)},
                    {tag_for(scenario, "far"), std::move(solved.far)}};
    } else {
        RdMatrix rd = process_sensing(rx, bank, sched, WindowKind::Standard, scenario.receiver);
        res.detections = find_peaks(rd, cfg, scenario.detection.peaks);
        for (const auto& t : scenario.targets)
            res.truth.push_back({physical_to_cell(t.range_m, t.velocity_kmh, cfg, grid.total), MapTag::Single});
        eval_map = rd;
        res.maps = {{tag_for(scenario, std::string(to_string(sched.scheme))), std::move(rd)}};
    }
    clock.lap(res.timing, "sensing_s");

    // Evaluate on a single map: near/far detections move to the stacked rows.
    std::vector<Detection> flat = res.detections;
    std::vector<TruthCell> flat_truth = res.truth;
    for (auto& d : flat)
        if (d.map == MapTag::Far) d.cell.range += l;
    for (auto& t : flat_truth)
        if (t.map == MapTag::Far) t.cell.range += l;
    for (auto& d : flat) d.map = MapTag::Single;
    for (auto& t : flat_truth) t.map = MapTag::Single;
    res.evaluation = evaluate(flat, flat_truth, eval_map, scenario.detection.tol_range, scenario.detection.tol_doppler);

    if (scenario.comms.enabled && payload_capacity(cfg, sched) > 0) {
        Rng bits_rng = Rng::stream(scenario.seed, "comms");
        Rng link_noise = Rng::stream(scenario.seed, "comms_noise");
        const auto bits = random_bits(2 * payload_capacity(cfg, sched), bits_rng);
        const double variance = 1.0 / std::pow(10.0, scenario.comms.snr_db / 10.0);
        res.link = run_link(bank, sched, bits, 1.0, variance, link_noise);
        clock.lap(res.timing, "comms_s");
    }

    // report
    json& rep = res.report;
    rep["scenario"] = scenario_to_json(scenario);
    rep["schedule"] = {{"scheme", std::string(to_string(sched.scheme))},
                       {"list", is_fsi(sched.scheme) ? sched.alpha : sched.slots},
                       {"grid_indices", grid.g}};
    const RdMatrix& ref = res.maps.front().rd;
    rep["grid"] = {{"range_bins", l},
                   {"doppler_bins", grid.total},
                   {"doppler_span", grid.doppler_span},
                   {"range_bin_m", cfg.range_bin_m()},
                   {"doppler_bin_hz", ref.doppler_bin_hz},
                   {"velocity_bin_kmh", ref.doppler_bin_hz * cfg.wavelength_m() / 2.0 * 3.6}};
    json dets = json::array();
    for (const auto& d : res.detections) {
        json e = cell_json(d.cell, ref);
        e["map"] = std::string(to_string(d.map));
        e["range_m"] = d.range_m;
        e["velocity_kmh"] = d.velocity_kmh;
        e["normalized_power"] = d.normalized_power;
        dets.push_back(e);
    }
    rep["detections"] = dets;
    json truth = json::array();
    for (std::size_t i = 0; i < res.truth.size(); ++i) {
        json e = cell_json(res.truth[i].cell, ref);
        e["map"] = std::string(to_string(res.truth[i].map));
        e["range_m"] = scenario.targets[i].range_m;
        e["velocity_kmh"] = scenario.targets[i].velocity_kmh;
        truth.push_back(e);
    }
    rep["truth"] = truth;
    json matched = json::array();
    for (const auto& m : res.evaluation.matched)
        matched.push_back({{"truth", m.truth},
                           {"detection", m.detection},
                           {"range_error_bins", m.range_error},
                           {"doppler_error_bins", m.doppler_error}});
    rep["evaluation"] = {{"matched", matched},
                         {"misses", res.evaluation.misses},
                         {"false_alarms", res.evaluation.false_alarms},
                         {"peak_to_interference_db", finite_or_null(res.evaluation.peak_to_interference_db)}};
    if (!pattern_info.is_null()) rep["pattern"] = pattern_info;
    if (res.link) {
        rep["comms"] = {{"bits", res.link->bits},
                        {"bit_errors", res.link->bit_errors},
                        {"ber", res.link->ber},
                        {"evm", res.link->evm},
                        {"analytic_ber", qpsk_ber(std::pow(10.0, scenario.comms.snr_db / 10.0))}};
    }
    json tags = json::array();
    for (const auto& m : res.maps) tags.push_back(m.tag);
    rep["maps"] = tags;

    res.exit_code = res.unresolvable_bins > 0 ? kExitUnresolvable : kExitOk;
    return res;
}

void write_maps(const RunResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& m : result.maps) {
        write_rd_bin(out_dir / ("rd_" + m.tag + ".bin"), m.rd);
        write_rd_csv(out_dir / ("rd_" + m.tag + ".csv"), m.rd);
    }
}

int run_simulate(const Scenario& scenario, const RunOptions& options, const std::filesystem::path& out_dir) {
    const RunResult res = run_scenario(scenario, options);
    write_maps(res, out_dir);
    write_text(out_dir / "report.json", res.report.dump(2) + "\n");
    write_text(out_dir / "timing.json", res.timing.dump(2) + "\n");
    return res.exit_code;
}

std::vector<std::string> preset_names() { return builtin_preset_names(); }

std::vector<Scenario> preset_scenarios(const std::string& name) {
    const std::string text = preset_json(name);
    if (text.empty()) throw ScenarioError("unknown preset '" + name + "'");
    const json j = json::parse(text);
    std::vector<Scenario> out;
    for (const auto& s : j.at("scenarios")) out.push_back(scenario_from_json(s));
    return out;
}

int run_preset(const std::string& name, std::optional<std::uint64_t> seed, const RunOptions& options,
               const std::filesystem::path& out_dir, std::vector<RunResult>* results) {
    std::vector<Scenario> scenarios = preset_scenarios(name);
    json report, timing;
    report["preset"] = name;
    report["runs"] = json::array();
    report["comparison"] = json::array();
    int code = kExitOk;
    std::vector<RunResult> all;
    for (auto& sc : scenarios) {
        if (seed) sc.seed = *seed;
        RunResult res = run_scenario(sc, options);
        write_maps(res, out_dir);
        json row = {{"name", sc.name},
                    {"scheme", std::string(to_string(sc.scheme))},
                    {"maps", res.report["maps"]},
                    {"detections", res.report["detections"].size()},
                    {"matched", res.evaluation.matched.size()},
                    {"misses", res.evaluation.misses.size()},
                    {"false_alarms", res.evaluation.false_alarms.size()},
                    {"peak_to_interference_db", res.report["evaluation"]["peak_to_interference_db"]}};
        if (res.link) row["ber"] = res.link->ber;
        report["comparison"].push_back(row);
        report["runs"].push_back(res.report);
        timing[sc.name.empty() ? std::string(to_string(sc.scheme)) : sc.name] = res.timing;
        code = std::max(code, res.exit_code);
        all.push_back(std::move(res));
    }
    write_text(out_dir / "report.json", report.dump(2) + "\n");
    write_text(out_dir / "timing.json", timing.dump(2) + "\n");
    if (results) *results = std::move(all);
    return code;
}

double pattern_spot_check(const WaveformBank& bank, const Schedule& schedule, const PatternTensor& pattern,
                          const SensingOptions& sensing, std::uint64_t seed, std::size_t cells) {
    const WaveformConfig& cfg = bank.cfg;
    const std::size_t l = cfg.occasion_len();
    const OccasionGrid grid = occasion_grid_indices(schedule, cfg);
    const cvec payload(payload_capacity(cfg, schedule), cplx{});
    const Frame tx = assemble_frame(bank, schedule, payload);
    ChannelConfig quiet;
    quiet.si_enabled = false;
    quiet.noise_enabled = false;
    Rng pick = Rng::stream(seed, "spot_check");
    SensingOptions plain = sensing;
    plain.adc = AdcPlacement::None;
    double worst = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const std::size_t d = sensing.n_guard + pick.below(l - sensing.n_guard);
        const long nu = static_cast<long>(pick.below(grid.doppler_span)) - static_cast<long>(grid.doppler_span / 2);
        for (std::size_t c = 0; c < 2; ++c) {
            const double delay = static_cast<double>(d + c * l);
            const double f = static_cast<double>(nu) / (static_cast<double>(grid.total) * cfg.t_chirp());
            const Target t{delay * kSpeedOfLight * cfg.t_s() / 2.0, f * cfg.wavelength_m() / 2.0, 1.0};
            Rng unused(0);
            const Frame rx = synthesize_rx(tx, {t}, quiet, cfg, unused);
            const RdMatrix rs = process_sensing(rx, bank, schedule, WindowKind::Standard, plain);
            const RdMatrix rh = process_sensing(rx, bank, schedule, WindowKind::Shifted, plain);
            const std::size_t col = rs.doppler_index(nu);
            const PatternCell& cell = pattern.at(d, nu);
            worst = std::max(worst, std::abs(rs.at(d, col) - cell.p[c][0]) / std::max(1.0, std::abs(cell.p[c][0])));
            worst = std::max(worst, std::abs(rh.at(d, col) - cell.p[c][1]) / std::max(1.0, std::abs(cell.p[c][1])));
        }
    }
    return worst;
}

int run_calibrate(const Scenario& scenario, const RunOptions& options, const std::filesystem::path& out_dir,
                  json* summary) {
    if (scenario.scheme != Scheme::FsiTail) throw ScenarioError("calibrate: scheme must be fsi_tail");
    const WaveformBank bank(scenario.waveform);
    const Schedule sched = resolve_schedule(scenario);
    RunOptions opts = options;
    if (opts.cache_dir.empty()) opts.cache_dir = out_dir;
    const PatternLookup lookup = obtain_pattern(scenario, bank, sched, opts);
    const PatternTensor& pat = lookup.pattern;

    json bad = json::array();
    double max_cond = 0.0;
    for (std::size_t d = 0; d < pat.range_bins; ++d) {
        for (std::size_t b = 0; b < pat.doppler_span; ++b) {
            const PatternCell& c = pat.cells[d * pat.doppler_span + b];
            if (c.guarded) continue;
            if (!c.resolvable) bad.push_back({{"range_bin", d}, {"signed_doppler_bin", pat.band_doppler(b)}, {"cond", finite_or_null(c.cond)}});
            else max_cond = std::max(max_cond, c.cond);
        }
    }
    const double delta = pattern_spot_check(bank, sched, pat, scenario.receiver, scenario.seed);
    char key[20];
    std::snprintf(key, sizeof key, "%016llx", static_cast<unsigned long long>(pattern_key(scenario)));
    json out = {{"key", key},
                {"cache_file", lookup.cache_file.string()},
                {"cache_hit", lookup.cache_hit},
                {"range_bins", pat.range_bins},
                {"doppler_span", pat.doppler_span},
                {"max_condition_number", max_cond},
                {"unresolvable_bins", bad.size()},
                {"unresolvable", bad},
                {"spot_check_max_delta", delta},
                {"spot_check_pass", delta <= 1e-6}};
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / "calibration.json", out.dump(2) + "\n");
    if (summary) *summary = out;
    if (!bad.empty()) return kExitUnresolvable;
    return delta <= 1e-6 ? kExitOk : kExitFailure;
}

}  // namespace jcas::app
