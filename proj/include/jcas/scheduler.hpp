#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jcas/rng.hpp"

namespace jcas {

struct WaveformConfig;

enum class Scheme { SensingOnly, PeriodicTD, RTD, FsiRandom, FsiTail };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

inline bool is_fsi(Scheme s) { return s == Scheme::FsiRandom || s == Scheme::FsiTail; }

struct Schedule {
    Scheme scheme = Scheme::RTD;
    std::size_t m = 4;
    std::size_t k = 1;
    /// FSI: sensing code of each symbol. RTD family: slot inside its group.
    std::vector<std::size_t> alpha;
    /// RTD family only: scheduled slots in [0, M*K), ascending.
    std::vector<std::size_t> slots;
    std::uint64_t seed = 0;
    bool one_per_group = false;

    /// Number of sensing occasions.
    std::size_t occasions() const { return is_fsi(scheme) ? alpha.size() : slots.size(); }
};

/// SensingOnly: all M*K slots. PeriodicTD: slot 0 of each group. RTD: K of
/// M*K slots without replacement (or one per group). FsiRandom: alpha_k
/// uniform on [0, M). FsiTail: alpha_k = M-1.
Schedule make_schedule(Scheme scheme, std::size_t m, std::size_t k, Rng& rng,
                       bool one_per_group = false);

/// Rebuild a schedule from an explicit list (alpha for FSI, slots for RTD).
/// Throws std::invalid_argument on out-of-range or unsorted input.
Schedule schedule_from_list(Scheme scheme, std::size_t m, std::size_t k,
                            const std::vector<std::size_t>& list, bool one_per_group = false);

/// Positions of the sensing occasions on the slow-time grid.
struct OccasionGrid {
    std::vector<std::size_t> g;
    std::size_t total = 0;
    /// Width of the unambiguous Doppler band in bins (== total unless the
    /// scheme samples slow time uniformly with a stride > 1).
    std::size_t doppler_span = 0;
};

/// RTD family: g_k = slot, total M*K. FSI: g_k = k(M + q) + q + alpha_k with
/// q = n_cp / L, total K(M + q).
OccasionGrid occasion_grid_indices(const Schedule& schedule, const WaveformConfig& cfg);

}  // namespace jcas
