#pragma once

#include <cstddef>
#include <vector>

#include "jcas/types.hpp"

namespace jcas {

/// Range bin d, Doppler bin nu (unsigned, 0..G-1).
struct Cell {
    std::size_t range = 0;
    std::size_t doppler = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

/// L x G range-Doppler map, row-major by range bin.
struct RdMatrix {
    std::size_t range_bins = 0;
    std::size_t doppler_bins = 0;
    /// Width of the unambiguous Doppler band; columns outside it are zero.
    std::size_t doppler_span = 0;
    /// Added to the range bin index when converting to meters (L for the
    /// far map of the dual-window solve).
    std::size_t range_offset_bins = 0;
    double range_bin_m = 0.0;
    double doppler_bin_hz = 0.0;
    cvec values;

    RdMatrix() = default;
    RdMatrix(std::size_t rows, std::size_t cols, std::size_t span);

    cplx& at(std::size_t d, std::size_t nu) { return values[d * doppler_bins + nu]; }
    const cplx& at(std::size_t d, std::size_t nu) const { return values[d * doppler_bins + nu]; }
    cplx& at(const Cell& c) { return at(c.range, c.doppler); }
    const cplx& at(const Cell& c) const { return at(c.range, c.doppler); }

    /// nu wrapped to [-G/2, G/2).
    long signed_doppler(std::size_t nu) const;
    /// Unsigned column of a signed Doppler bin.
    std::size_t doppler_index(long signed_nu) const;
    bool in_band(std::size_t nu) const;

    double max_power() const;
};

}  // namespace jcas
