#include "jcas/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "jcas/waveform.hpp"

namespace jcas {

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::SensingOnly: return "sensing_only";
        case Scheme::PeriodicTD: return "periodic_td";
        case Scheme::RTD: return "rtd";
        case Scheme::FsiRandom: return "fsi_random";
        case Scheme::FsiTail: return "fsi_tail";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::SensingOnly, Scheme::PeriodicTD, Scheme::RTD, Scheme::FsiRandom,
                     Scheme::FsiTail}) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

namespace {

void fill_alpha_from_slots(Schedule& s) {
    s.alpha.clear();
    for (auto slot : s.slots) s.alpha.push_back(slot % s.m);
}

}  // namespace

Schedule make_schedule(Scheme scheme, std::size_t m, std::size_t k, Rng& rng,
                       bool one_per_group) {
    if (m < 2) throw std::invalid_argument("make_schedule: M must be >= 2");
    if (k < 1) throw std::invalid_argument("make_schedule: K must be >= 1");
    Schedule s;
    s.scheme = scheme;
    s.m = m;
    s.k = k;
    s.one_per_group = one_per_group;
    const std::size_t total = m * k;
    switch (scheme) {
        case Scheme::SensingOnly:
            for (std::size_t i = 0; i < total; ++i) s.slots.push_back(i);
            fill_alpha_from_slots(s);
            break;
        case Scheme::PeriodicTD:
            for (std::size_t i = 0; i < k; ++i) s.slots.push_back(i * m);
            fill_alpha_from_slots(s);
            break;
        case Scheme::RTD:
            if (one_per_group) {
                for (std::size_t i = 0; i < k; ++i) s.slots.push_back(i * m + rng.below(m));
            } else {
                // partial Fisher-Yates: first k entries are a uniform k-subset
                std::vector<std::size_t> pool(total);
                for (std::size_t i = 0; i < total; ++i) pool[i] = i;
                for (std::size_t i = 0; i < k; ++i) {
                    const std::size_t j = i + rng.below(total - i);
                    std::swap(pool[i], pool[j]);
                }
                s.slots.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
                std::sort(s.slots.begin(), s.slots.end());
            }
            fill_alpha_from_slots(s);
            break;
        case Scheme::FsiRandom:
            for (std::size_t i = 0; i < k; ++i) s.alpha.push_back(rng.below(m));
            break;
        case Scheme::FsiTail:
            s.alpha.assign(k, m - 1);
            break;
    }
    return s;
}

Schedule schedule_from_list(Scheme scheme, std::size_t m, std::size_t k,
                            const std::vector<std::size_t>& list, bool one_per_group) {
    if (m < 2 || k < 1) throw std::invalid_argument("schedule_from_list: bad M or K");
    Schedule s;
    s.scheme = scheme;
    s.m = m;
    s.k = k;
    s.one_per_group = one_per_group;
    if (is_fsi(scheme)) {
        if (list.size() != k) throw std::invalid_argument("schedule_from_list: need K alphas");
        for (auto a : list) {
            if (a >= m) throw std::invalid_argument("schedule_from_list: alpha out of range");
            if (scheme == Scheme::FsiTail && a != m - 1)
                throw std::invalid_argument("schedule_from_list: FsiTail requires alpha = M-1");
        }
        s.alpha = list;
    } else {
        const std::size_t expected = scheme == Scheme::SensingOnly ? m * k : k;
        if (list.size() != expected) throw std::invalid_argument("schedule_from_list: slot count");
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i] >= m * k) throw std::invalid_argument("schedule_from_list: slot range");
            if (i > 0 && list[i] <= list[i - 1])
                throw std::invalid_argument("schedule_from_list: slots must be increasing");
        }
        s.slots = list;
        fill_alpha_from_slots(s);
    }
    return s;
}

OccasionGrid occasion_grid_indices(const Schedule& schedule, const WaveformConfig& cfg) {
    OccasionGrid grid;
    if (is_fsi(schedule.scheme)) {
        const std::size_t l = cfg.occasion_len();
        if (cfg.n_cp % l != 0)
            throw std::invalid_argument("occasion_grid_indices: n_cp must be a multiple of L");
        if (schedule.m != cfg.m_codes)
            throw std::invalid_argument("occasion_grid_indices: schedule M != config M");
        const std::size_t q = cfg.n_cp / l;
        const std::size_t per_symbol = schedule.m + q;
        for (std::size_t k = 0; k < schedule.alpha.size(); ++k)
            grid.g.push_back(k * per_symbol + q + schedule.alpha[k]);
        grid.total = schedule.alpha.size() * per_symbol;
        grid.doppler_span =
            schedule.scheme == Scheme::FsiTail ? grid.total / per_symbol : grid.total;
    } else {
        grid.g = schedule.slots;
        grid.total = schedule.m * schedule.k;
        grid.doppler_span =
            schedule.scheme == Scheme::PeriodicTD ? grid.total / schedule.m : grid.total;
    }
    return grid;
}

}  // namespace jcas
