#include "jcas/rd_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace jcas {

RdMatrix::RdMatrix(std::size_t rows, std::size_t cols, std::size_t span)
    : range_bins(rows), doppler_bins(cols), doppler_span(span), values(rows * cols, 0.0) {
    if (span == 0 || span > cols) throw std::invalid_argument("RdMatrix: bad Doppler span");
}

long RdMatrix::signed_doppler(std::size_t nu) const {
    const long g = static_cast<long>(doppler_bins);
    long v = static_cast<long>(nu % doppler_bins);
    if (v >= g - g / 2) v -= g;  // [-G/2, G/2) for even G
    return v;
}

std::size_t RdMatrix::doppler_index(long signed_nu) const {
    const long g = static_cast<long>(doppler_bins);
    return static_cast<std::size_t>(((signed_nu % g) + g) % g);
}

bool RdMatrix::in_band(std::size_t nu) const {
    if (doppler_span == doppler_bins) return true;
    const long v = signed_doppler(nu);
    const long half = static_cast<long>(doppler_span / 2);
    return v >= -half && v < static_cast<long>(doppler_span) - half;
}

double RdMatrix::max_power() const {
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::norm(v));
    return best;
}

}  // namespace jcas
