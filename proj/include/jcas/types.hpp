#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace jcas {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Propagation speed used for every range/Doppler conversion.
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline cplx unit_phasor(double cycles) {
    return std::polar(1.0, kTwoPi * cycles);
}

/// Sum of |v|^2.
double energy(const cvec& v);

}  // namespace jcas
