#include <catch_amalgamated.hpp>

#include <invstat/stats.hpp>

#include <cmath>
#include <vector>

using namespace invstat;

TEST_CASE("compensated summation survives adversarial orderings") {
    KahanSum s;
    s.add(1e16);
    for (int i = 0; i < 10; ++i) s.add(1.0);
    s.add(-1e16);
    REQUIRE(s.value() == Catch::Approx(10.0).margin(1e-9));

    KahanSum t;
    for (int i = 0; i < 10; ++i) t.add(0.1);
    REQUIRE(t.value() == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("summarize computes mean, variance, stderr") {
    const std::vector<double> xs{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    const MomentSummary m = summarize(xs);
    REQUIRE(m.mean == Catch::Approx(5.0));
    REQUIRE(m.variance == Catch::Approx(32.0 / 7.0));  // unbiased
    REQUIRE(m.stderr_mean == Catch::Approx(std::sqrt(32.0 / 7.0 / 8.0)));
}

// Analytic special cases: Q(1/2, x) = erfc(sqrt(x)), Q(1, x) = e^-x,
// Q(2, x) = (1+x) e^-x.
TEST_CASE("regularized incomplete gamma against analytic forms") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.31745, 8.0, 20.0}) {
        REQUIRE(gamma_q(0.5, x) == Catch::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
        REQUIRE(gamma_q(1.0, x) == Catch::Approx(std::exp(-x)).epsilon(1e-12));
        REQUIRE(gamma_q(2.0, x) == Catch::Approx((1.0 + x) * std::exp(-x)).epsilon(1e-12));
    }
}

TEST_CASE("chi-square p-values at textbook critical points") {
    // chi2 with 2 df: upper tail is exp(-x/2); 9.21034 gives 0.01
    REQUIRE(chi_square_p_value(9.21034, 2.0) == Catch::Approx(0.01).epsilon(1e-5));
    // 1 df: p(6.6349) = erfc(sqrt(6.6349/2)) = 0.01
    REQUIRE(chi_square_p_value(6.6349, 1.0) == Catch::Approx(0.01).epsilon(1e-4));
    REQUIRE(chi_square_p_value(0.0, 5.0) == 1.0);
}

TEST_CASE("goodness of fit accepts matching counts and rejects shifted ones") {
    const std::vector<double> expected{250.0, 250.0, 250.0, 250.0};
    const auto good = chi_square_gof({260.0, 240.0, 255.0, 245.0}, expected);
    REQUIRE(good.p_value > 0.5);
    const auto bad = chi_square_gof({400.0, 100.0, 250.0, 250.0}, expected);
    REQUIRE(bad.p_value < 1e-6);
}

TEST_CASE("cells with small expectation are pooled") {
    // last two cells expect 1 each; pooled into the previous cell
    const auto r = chi_square_gof({500.0, 496.0, 3.0, 1.0}, {500.0, 498.0, 1.0, 1.0});
    REQUIRE(r.cells_used == 2);
    REQUIRE(r.p_value > 0.1);
}

TEST_CASE("two-sample chi-square distinguishes equal and unequal laws") {
    const auto same = chi_square_two_sample({500.0, 300.0, 200.0}, {510.0, 290.0, 200.0});
    REQUIRE(same.p_value > 0.3);
    const auto diff = chi_square_two_sample({500.0, 300.0, 200.0}, {200.0, 300.0, 500.0});
    REQUIRE(diff.p_value < 1e-10);
}

TEST_CASE("two-sample with a single effective cell trivially agrees") {
    const auto r = chi_square_two_sample({3.0}, {2.0});
    REQUIRE(r.p_value == 1.0);
    REQUIRE(r.df == 0.0);
}
