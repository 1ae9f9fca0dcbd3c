#include <catch_amalgamated.hpp>

#include <invstat/rng.hpp>

#include <set>
#include <vector>

using namespace invstat;

TEST_CASE("substreams are deterministic and reproducible") {
    Rng a(123, 7), b(123, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Rng c = make_stream(123, 7);
    Rng d(RandomStreamSpec{123, 7});
    REQUIRE(c.next_u64() == d.next_u64());
}

TEST_CASE("distinct stream indices give distinct streams") {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t idx = 0; idx < 1000; ++idx) {
        Rng r(42, idx);
        firsts.insert(r.next_u64());
    }
    REQUIRE(firsts.size() == 1000);

    Rng x(1, 0), y(2, 0);
    REQUIRE(x.next_u64() != y.next_u64());
}

TEST_CASE("uniform01 lies in [0,1) and uniform_pos in (0,1)") {
    Rng r(9, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform_pos();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("exponential draws are positive, finite, mean approximately 1") {
    Rng r(11, 3);
    double sum = 0.0;
    const int trials = 200000;
    for (int i = 0; i < trials; ++i) {
        const double e = r.exponential();
        REQUIRE(e > 0.0);
        REQUIRE(std::isfinite(e));
        sum += e;
    }
    const double mean = sum / trials;
    // stderr = 1/sqrt(trials) ~ 0.0022
    REQUIRE(std::abs(mean - 1.0) < 3.0 * 0.00224);
}

TEST_CASE("below(n) is bounded and roughly uniform") {
    Rng r(5, 1);
    std::vector<int> counts(10, 0);
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        const auto v = r.below(10);
        REQUIRE(v < 10);
        ++counts[v];
    }
    for (int c : counts) REQUIRE(std::abs(c - trials / 10) < 5 * 95);  // 5 sigma
}
