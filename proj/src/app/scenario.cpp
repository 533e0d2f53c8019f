#include "jcas/app/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace jcas::app {

using nlohmann::json;

std::string_view to_string(AdcPlacement p) {
    switch (p) {
        case AdcPlacement::None: return "none";
        case AdcPlacement::RawRx: return "raw_rx";
        case AdcPlacement::AfterSum: return "after_sum";
    }
    return "unknown";
}

namespace {

void require_object(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ScenarioError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ScenarioError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ScenarioError("");
            out = v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ScenarioError("");
            if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) throw ScenarioError("");
            out = v.get<T>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ScenarioError("");
            out = v.get<T>();
            if (!std::isfinite(out)) throw ScenarioError("");
        } else {
            if (!v.is_string()) throw ScenarioError("");
            out = v.get<T>();
        }
    } catch (const std::exception&) {
        throw ScenarioError(where + "." + key + ": wrong type or out of range");
    }
}

void check(bool ok, const std::string& msg) {
    if (!ok) throw ScenarioError(msg);
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    require_object(j, "scenario",
                   {"name", "seed", "waveform", "scheme", "k", "rtd_one_per_group", "schedule", "targets", "channel",
                    "receiver", "detection", "comms"});
    Scenario s;
    read(j, "name", s.name, "scenario");
    read(j, "seed", s.seed, "scenario");

    std::string scheme = "rtd";
    read(j, "scheme", scheme, "scenario");
    const auto parsed = parse_scheme(scheme);
    check(parsed.has_value(), "scenario.scheme: unknown scheme '" + scheme + "'");
    s.scheme = *parsed;
    s.k = is_fsi(s.scheme) ? 64 : 80;
    read(j, "k", s.k, "scenario");
    check(s.k >= 1, "scenario.k must be >= 1");
    read(j, "rtd_one_per_group", s.rtd_one_per_group, "scenario");

    if (j.contains("waveform")) {
        const json& w = j.at("waveform");
        require_object(w, "waveform", {"n_fft", "m_codes", "n_cp", "scs_hz", "carrier_hz", "sensing_scale"});
        read(w, "n_fft", s.waveform.n_fft, "waveform");
        read(w, "m_codes", s.waveform.m_codes, "waveform");
        read(w, "n_cp", s.waveform.n_cp, "waveform");
        read(w, "scs_hz", s.waveform.scs_hz, "waveform");
        read(w, "carrier_hz", s.waveform.carrier_hz, "waveform");
        read(w, "sensing_scale", s.waveform.sensing_scale, "waveform");
    }
    try {
        s.waveform.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    check(s.waveform.scs_hz > 0.0 && s.waveform.carrier_hz > 0.0, "waveform: scs_hz and carrier_hz must be > 0");
    check(s.waveform.sensing_scale >= 0.0, "waveform.sensing_scale must be >= 0");

    if (j.contains("schedule")) {
        const json& l = j.at("schedule");
        check(l.is_array(), "scenario.schedule: expected an array");
        std::vector<std::size_t> list;
        for (const auto& v : l) {
            check(v.is_number_unsigned(), "scenario.schedule: entries must be non-negative integers");
            list.push_back(v.get<std::size_t>());
        }
        try {
            (void)schedule_from_list(s.scheme, s.waveform.m_codes, s.k, list, s.rtd_one_per_group);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError(e.what());
        }
        s.schedule = std::move(list);
    }

    if (j.contains("targets")) {
        const json& t = j.at("targets");
        check(t.is_array(), "scenario.targets: expected an array");
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string where = "targets[" + std::to_string(i) + "]";
            require_object(t[i], where, {"range_m", "velocity_kmh", "amplitude"});
            check(t[i].contains("range_m"), where + ".range_m is required");
            TargetSpec ts;
            read(t[i], "range_m", ts.range_m, where);
            read(t[i], "velocity_kmh", ts.velocity_kmh, where);
            read(t[i], "amplitude", ts.amplitude, where);
            check(ts.range_m >= 0.0, where + ".range_m must be >= 0");
            check(ts.amplitude > 0.0, where + ".amplitude must be > 0");
            s.targets.push_back(ts);
        }
    }

    if (j.contains("channel")) {
        const json& c = j.at("channel");
        require_object(c, "channel", {"si_over_echo_db", "echo_snr_db", "si_enabled", "noise_enabled", "fractional_delay"});
        read(c, "si_over_echo_db", s.channel.si_over_echo_db, "channel");
        read(c, "echo_snr_db", s.channel.echo_snr_db, "channel");
        read(c, "si_enabled", s.channel.si_enabled, "channel");
        read(c, "noise_enabled", s.channel.noise_enabled, "channel");
        read(c, "fractional_delay", s.channel.fractional_delay, "channel");
    }

    if (j.contains("receiver")) {
        const json& r = j.at("receiver");
        require_object(r, "receiver", {"n_guard", "adc", "adc_bits", "cond_limit"});
        read(r, "n_guard", s.receiver.n_guard, "receiver");
        std::string adc = "none";
        read(r, "adc", adc, "receiver");
        if (adc == "none") s.receiver.adc = AdcPlacement::None;
        else if (adc == "raw_rx") s.receiver.adc = AdcPlacement::RawRx;
        else if (adc == "after_sum") s.receiver.adc = AdcPlacement::AfterSum;
        else throw ScenarioError("receiver.adc: expected none, raw_rx or after_sum");
        read(r, "adc_bits", s.receiver.adc_bits, "receiver");
        read(r, "cond_limit", s.cond_limit, "receiver");
    }
    check(s.receiver.n_guard >= 1 && s.receiver.n_guard < s.waveform.occasion_len(),
          "receiver.n_guard must be in [1, L)");
    check(s.receiver.adc_bits >= 4 && s.receiver.adc_bits <= 16, "receiver.adc_bits must be in [4, 16]");
    check(s.cond_limit > 1.0, "receiver.cond_limit must be > 1");

    if (j.contains("detection")) {
        const json& d = j.at("detection");
        require_object(d, "detection",
                       {"rel_threshold", "max_peaks", "guard", "tol_range", "tol_doppler", "cleanup", "cleanup_radius"});
        read(d, "rel_threshold", s.detection.peaks.rel_threshold, "detection");
        read(d, "max_peaks", s.detection.peaks.max_peaks, "detection");
        read(d, "guard", s.detection.peaks.guard, "detection");
        read(d, "tol_range", s.detection.tol_range, "detection");
        read(d, "tol_doppler", s.detection.tol_doppler, "detection");
        read(d, "cleanup", s.detection.cleanup, "detection");
        read(d, "cleanup_radius", s.detection.cleanup_radius, "detection");
    }
    check(s.detection.peaks.rel_threshold > 0.0 && s.detection.peaks.rel_threshold < 1.0,
          "detection.rel_threshold must be in (0, 1)");
    check(s.detection.peaks.max_peaks >= 1, "detection.max_peaks must be >= 1");
    check(s.detection.cleanup_radius >= 1, "detection.cleanup_radius must be >= 1");
    check(!s.detection.cleanup || s.scheme == Scheme::FsiTail, "detection.cleanup needs the fsi_tail scheme");

    if (j.contains("comms")) {
        const json& c = j.at("comms");
        require_object(c, "comms", {"enabled", "snr_db"});
        read(c, "enabled", s.comms.enabled, "comms");
        read(c, "snr_db", s.comms.snr_db, "comms");
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    j["waveform"] = {{"n_fft", s.waveform.n_fft},         {"m_codes", s.waveform.m_codes},
                     {"n_cp", s.waveform.n_cp},           {"scs_hz", s.waveform.scs_hz},
                     {"carrier_hz", s.waveform.carrier_hz}, {"sensing_scale", s.waveform.sensing_scale}};
    j["scheme"] = std::string(to_string(s.scheme));
    j["k"] = s.k;
    j["rtd_one_per_group"] = s.rtd_one_per_group;
    if (s.schedule) j["schedule"] = *s.schedule;
    j["targets"] = json::array();
    for (const auto& t : s.targets)
        j["targets"].push_back({{"range_m", t.range_m}, {"velocity_kmh", t.velocity_kmh}, {"amplitude", t.amplitude}});
    j["channel"] = {{"si_over_echo_db", s.channel.si_over_echo_db}, {"echo_snr_db", s.channel.echo_snr_db},
                    {"si_enabled", s.channel.si_enabled},           {"noise_enabled", s.channel.noise_enabled},
                    {"fractional_delay", s.channel.fractional_delay}};
    j["receiver"] = {{"n_guard", s.receiver.n_guard},
                     {"adc", std::string(to_string(s.receiver.adc))},
                     {"adc_bits", s.receiver.adc_bits},
                     {"cond_limit", s.cond_limit}};
    j["detection"] = {{"rel_threshold", s.detection.peaks.rel_threshold},
                      {"max_peaks", s.detection.peaks.max_peaks},
                      {"guard", s.detection.peaks.guard},
                      {"tol_range", s.detection.tol_range},
                      {"tol_doppler", s.detection.tol_doppler},
                      {"cleanup", s.detection.cleanup},
                      {"cleanup_radius", s.detection.cleanup_radius}};
    j["comms"] = {{"enabled", s.comms.enabled}, {"snr_db", s.comms.snr_db}};
    return j;
}

}  // namespace jcas::app
