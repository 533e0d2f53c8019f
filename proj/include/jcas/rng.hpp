#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "jcas/types.hpp"

namespace jcas {

/// Seeded random source used everywhere in the simulator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions on top of it are implemented here rather than
/// taken from <random> because the standard library distributions are not
/// required to produce the same values on different implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for a named purpose ("schedule", "noise", ...).
    /// The child depends only on (seed, name), never on how much of the
    /// parent has been consumed.
    static Rng stream(std::uint64_t seed, std::string_view name);

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer on [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal (Box-Muller, one draw consumed pair-wise).
    double normal();

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_normal(double variance);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace jcas
