#pragma once

#include <span>

#include "jcas/types.hpp"

namespace jcas {

/// Unitary DFT: out[k] = 1/sqrt(n) * sum_t v[t] e^{-j2pi kt/n}.
/// Throws std::invalid_argument on empty input.
cvec unitary_dft(std::span<const cplx> v);

/// Inverse of unitary_dft (same 1/sqrt(n) scale).
cvec unitary_idft(std::span<const cplx> v);

}  // namespace jcas
