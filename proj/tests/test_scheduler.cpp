#include "doctest.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "jcas/rng.hpp"
#include "jcas/scheduler.hpp"
#include "jcas/waveform.hpp"

using namespace jcas;

TEST_CASE("mt19937_64 reference value") {
    // 10000th output of a default-seeded mt19937_64, fixed by the standard
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next();
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("rng streams and distributions") {
    Rng a = Rng::stream(42, "noise");
    Rng b = Rng::stream(42, "noise");
    Rng c = Rng::stream(42, "schedule");
    bool any_diff = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        any_diff |= x != c.next();
    }
    CHECK(any_diff);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);

    Rng r(1);
    CHECK_THROWS_AS(r.below(0), std::invalid_argument);
    double mean = 0.0, power = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        const cplx z = r.complex_normal(2.0);
        mean += z.real();
        power += std::norm(z);
    }
    CHECK(std::abs(mean / n) < 0.02);
    CHECK(power / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("deterministic schedules") {
    Rng rng(0);
    const Schedule so = make_schedule(Scheme::SensingOnly, 4, 2, rng);
    CHECK(so.slots == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});
    const Schedule pt = make_schedule(Scheme::PeriodicTD, 4, 3, rng);
    CHECK(pt.slots == std::vector<std::size_t>{0, 4, 8});
    const Schedule tail = make_schedule(Scheme::FsiTail, 4, 5, rng);
    CHECK(tail.alpha == std::vector<std::size_t>(5, 3));
    CHECK(tail.occasions() == 5);
}

TEST_CASE("schedule errors") {
    Rng rng(0);
    CHECK_THROWS_AS(make_schedule(Scheme::RTD, 1, 4, rng), std::invalid_argument);
    CHECK_THROWS_AS(make_schedule(Scheme::RTD, 4, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_list(Scheme::RTD, 4, 2, {3, 3}), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_list(Scheme::RTD, 4, 2, {5, 2}), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_list(Scheme::RTD, 4, 2, {1, 8}), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_list(Scheme::FsiRandom, 4, 2, {0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(schedule_from_list(Scheme::FsiTail, 4, 2, {3, 2}), std::invalid_argument);
    CHECK(parse_scheme("rtd") == Scheme::RTD);
    CHECK(parse_scheme("fsi_tail") == Scheme::FsiTail);
    CHECK_FALSE(parse_scheme("bogus").has_value());
}

TEST_CASE("RTD schedule invariants over seeds") {
    std::vector<int> counts(320, 0);
    const int seeds = 2000;
    for (int seed = 0; seed < seeds; ++seed) {
        Rng rng(static_cast<std::uint64_t>(seed));
        const Schedule s = make_schedule(Scheme::RTD, 4, 80, rng);
        REQUIRE(s.slots.size() == 80);
        CHECK(std::is_sorted(s.slots.begin(), s.slots.end()));
        CHECK(std::set<std::size_t>(s.slots.begin(), s.slots.end()).size() == 80);
        CHECK(s.slots.back() < 320);
        for (auto slot : s.slots) ++counts[slot];

        Rng again(static_cast<std::uint64_t>(seed));
        CHECK(make_schedule(Scheme::RTD, 4, 80, again).slots == s.slots);

        Rng grp(static_cast<std::uint64_t>(seed));
        const Schedule one = make_schedule(Scheme::RTD, 4, 80, grp, true);
        for (std::size_t k = 0; k < 80; ++k) CHECK(one.slots[k] / 4 == k);
    }
    // each slot is chosen with probability K/(MK) = 1/4
    const double expect = seeds / 4.0;
    const double sigma = std::sqrt(seeds * 0.25 * 0.75);
    for (int c : counts) CHECK(std::abs(c - expect) < 5.0 * sigma);
}

TEST_CASE("golden RTD schedule, M = 4, K = 80, seed 42") {
    std::ifstream in(std::string(JCAS_TEST_DATA_DIR) + "/golden/rtd_m4_k80_seed42.txt");
    REQUIRE(in.good());
    std::vector<std::size_t> golden;
    std::size_t v;
    while (in >> v) golden.push_back(v);
    Rng rng(42);
    CHECK(make_schedule(Scheme::RTD, 4, 80, rng).slots == golden);
}

TEST_CASE("occasion grid") {
    const WaveformConfig cfg;
    Rng rng(9);
    const Schedule f = make_schedule(Scheme::FsiRandom, 4, 64, rng);
    const OccasionGrid g = occasion_grid_indices(f, cfg);
    CHECK(g.total == 320);
    CHECK(g.doppler_span == 320);
    for (std::size_t k = 0; k < 64; ++k) CHECK(g.g[k] == k * 5 + 1 + f.alpha[k]);

    const OccasionGrid tail = occasion_grid_indices(make_schedule(Scheme::FsiTail, 4, 64, rng), cfg);
    CHECK(tail.g[0] == 4);
    CHECK(tail.g[1] == 9);
    CHECK(tail.doppler_span == 64);

    const OccasionGrid pt = occasion_grid_indices(make_schedule(Scheme::PeriodicTD, 4, 80, rng), cfg);
    CHECK(pt.total == 320);
    CHECK(pt.doppler_span == 80);
    const OccasionGrid rtd = occasion_grid_indices(make_schedule(Scheme::RTD, 4, 80, rng), cfg);
    CHECK(rtd.doppler_span == 320);
}
