#include <catch_amalgamated.hpp>

#include <invstat/weights.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace invstat;

namespace {

// Feeds a fixed cycle of uniforms; enough duck-typing for the realizers.
struct ForcedRng {
    std::vector<double> values;
    std::size_t at = 0;
    double uniform01() {
        const double v = values[at % values.size()];
        ++at;
        return v;
    }
    double uniform_pos() { return uniform01(); }
    double exponential() { return -std::log(uniform_pos()); }
};

}  // namespace

TEST_CASE("geometric weights match the formula") {
    const WeightVector wv = geometric_weights(0.5, 3);
    REQUIRE(wv.w[0] == Catch::Approx(0.5).epsilon(1e-15));
    REQUIRE(wv.w[1] == Catch::Approx(0.25).epsilon(1e-15));
    REQUIRE(wv.w[2] == Catch::Approx(0.125).epsilon(1e-15));
    REQUIRE(geometric_weights(0.5, 1).w == std::vector<double>{0.5});

    const WeightVector wv9 = geometric_weights(0.9, 2);
    REQUIRE(wv9.w[0] == Catch::Approx(0.1).epsilon(1e-14));
    REQUIRE(wv9.w[1] == Catch::Approx(0.09).epsilon(1e-14));

    REQUIRE_THROWS_AS(geometric_weights(0.0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(geometric_weights(1.0, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(geometric_weights(1.5, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(geometric_weights(0.5, 0), std::invalid_argument);
}

TEST_CASE("geometric prefix telescopes to 1 - q^n") {
    for (double q : {0.2, 0.5, 0.9, 0.99}) {
        for (std::size_t n : {std::size_t(1), std::size_t(10), std::size_t(500)}) {
            const WeightVector wv = geometric_weights(q, n);
            const double expected = -std::expm1(static_cast<double>(n) * std::log(q));
            REQUIRE(wv.total() == Catch::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("uniform and explicit weights") {
    const WeightVector u = uniform_weights(4);
    REQUIRE(u.w == std::vector<double>{0.25, 0.25, 0.25, 0.25});
    REQUIRE(u.total() == Catch::Approx(1.0).epsilon(1e-15));

    const WeightVector e = explicit_weights({1.0, 2.0, 3.0});
    REQUIRE(e.prefix == std::vector<double>{1.0, 3.0, 6.0});

    REQUIRE_THROWS_AS(explicit_weights({1.0, 0.0, 1.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(explicit_weights({}), std::invalid_argument);
    REQUIRE_THROWS_AS(explicit_weights({1.0, -2.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(uniform_weights(0), std::invalid_argument);
}

TEST_CASE("gem realization with a forced stream") {
    // all uniforms = 0.5: W_k = 1 - 0.5^(1/theta), sticks identical
    for (double theta : {0.7, 1.0, 2.0}) {
        ForcedRng rng{{0.5}, 0};
        const WeightVector wv = realize_gem(theta, 5, rng);
        const double stick = -std::expm1(std::log(0.5) / theta);
        double remaining = 1.0;
        for (std::size_t k = 0; k < 5; ++k) {
            REQUIRE(wv.w[k] == Catch::Approx(remaining * stick).epsilon(1e-12));
            remaining *= 1.0 - stick;
        }
        // stick-breaking telescoping: 1 - prefix(n) = prod (1 - W_i)
        REQUIRE(1.0 - wv.total() == Catch::Approx(remaining).epsilon(1e-12));
    }
}

TEST_CASE("gem telescoping holds for random realizations") {
    for (std::uint64_t idx = 0; idx < 20; ++idx) {
        Rng rng(77, idx);
        Rng replay(77, idx);
        const double theta = 1.5;
        const WeightVector wv = realize_gem(theta, 50, rng);
        // recompute prod(1-W_i) from the same stream: 1-W = U^(1/theta)
        double log_prod = 0.0;
        for (int k = 0; k < 50; ++k) log_prod += std::log(replay.uniform_pos()) / theta;
        REQUIRE(1.0 - wv.total() == Catch::Approx(std::exp(log_prod)).epsilon(1e-11));
        for (double w : wv.w) {
            REQUIRE(w > 0.0);
            REQUIRE(std::isfinite(w));
        }
    }
}

TEST_CASE("gem stick means match the Beta(1,theta) moments") {
    // E[P_1] = E[W_1] = 1/(theta+1)
    for (double theta : {1.0, 2.0}) {
        double sum = 0.0;
        const int trials = 100000;
        for (int t = 0; t < trials; ++t) {
            Rng rng(101, static_cast<std::uint64_t>(t));
            sum += realize_gem(theta, 1, rng).w[0];
        }
        const double mean = sum / trials;
        const double expect = 1.0 / (theta + 1.0);
        // Var W = theta / ((theta+1)^2 (theta+2))
        const double sd = std::sqrt(theta / ((theta + 1.0) * (theta + 1.0) * (theta + 2.0)));
        REQUIRE(std::abs(mean - expect) < 3.0 * sd / std::sqrt(trials));
    }
}

TEST_CASE("iid product weights from a forced stream stay unnormalized") {
    ForcedRng rng{{0.5}, 0};
    const WeightVector wv = realize_iid_prod(1.0, 2, rng);
    REQUIRE(wv.w[0] == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(wv.w[1] == Catch::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("iid product first weight has mean theta/(theta+1)") {
    const double theta = 2.0;
    double sum = 0.0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        Rng rng(202, static_cast<std::uint64_t>(t));
        sum += realize_iid_prod(theta, 1, rng).w[0];
    }
    const double mean = sum / trials;
    // E U^(1/theta) = theta/(theta+1); Var = theta/(theta+2) - (theta/(theta+1))^2
    const double expect = theta / (theta + 1.0);
    const double var = theta / (theta + 2.0) - expect * expect;
    REQUIRE(std::abs(mean - expect) < 3.0 * std::sqrt(var / trials));
}

TEST_CASE("iid product ratios are IID with density theta x^(theta-1)") {
    const double theta = 2.0;
    const std::size_t n = 4001;
    Rng rng(303, 0);
    const WeightVector wv = realize_iid_prod(theta, n, rng);
    std::vector<double> ratios(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k)
        ratios[k] = std::exp(wv.log_w[k + 1] - wv.log_w[k]);

    // one-sample Kolmogorov-Smirnov against F(x) = x^theta
    std::vector<double> sorted(ratios);
    std::sort(sorted.begin(), sorted.end());
    double dmax = 0.0;
    const double N = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = std::pow(sorted[i], theta);
        dmax = std::max(dmax, std::abs(f - static_cast<double>(i) / N));
        dmax = std::max(dmax, std::abs(static_cast<double>(i + 1) / N - f));
    }
    REQUIRE(dmax < 1.63 / std::sqrt(N));  // alpha = 0.01

    // lag-1 correlation of consecutive ratios is near zero
    double mx = 0.0;
    for (double r : ratios) mx += r;
    mx /= N;
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t k = 0; k + 1 < ratios.size(); ++k) {
        c0 += (ratios[k] - mx) * (ratios[k] - mx);
        c1 += (ratios[k] - mx) * (ratios[k + 1] - mx);
    }
    REQUIRE(std::abs(c1 / c0) < 4.0 / std::sqrt(N));
}

TEST_CASE("model realization dispatch and validation") {
    Rng rng(1, 0);
    REQUIRE(realize(parse_weight_model("uniform"), 3, rng).w ==
            std::vector<double>(3, 1.0 / 3.0));
    REQUIRE_THROWS_AS(realize(parse_weight_model("explicit:1,2"), 3, rng),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(realize_gem(-1.0, 3, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(realize_iid_prod(0.0, 3, rng), std::invalid_argument);
}

TEST_CASE("weight model strings parse and reject junk") {
    REQUIRE(parse_weight_model("geo:q=0.5").q == 0.5);
    REQUIRE(parse_weight_model("gem:theta=2").theta == 2.0);
    REQUIRE(parse_weight_model("iidprod:theta=2").kind == WeightKind::IIDProd);
    REQUIRE(parse_weight_model("uniform").kind == WeightKind::Uniform);
    REQUIRE(parse_weight_model("explicit:1,2,3").values == std::vector<double>{1.0, 2.0, 3.0});

    REQUIRE_THROWS_AS(parse_weight_model("geo:q=1.5"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("geo"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("gem:theta=-1"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("explicit:1,oops"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("explicit:"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("nonsense"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("uniform:n=3"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_weight_model("geo:q=0.5junk"), std::invalid_argument);
}

TEST_CASE("log weights stay exact beyond the linear underflow horizon") {
    const WeightVector wv = geometric_weights(0.1, 400);
    // linear weights underflow long before k=400, log weights do not
    REQUIRE(wv.w.back() == 0.0);
    REQUIRE(std::isfinite(wv.log_w.back()));
    REQUIRE(wv.log_w.back() == Catch::Approx(std::log1p(-0.1) + 399.0 * std::log(0.1)));
    // prefix still nondecreasing
    REQUIRE(std::is_sorted(wv.prefix.begin(), wv.prefix.end()));
}
