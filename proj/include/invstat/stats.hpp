#pragma once

// Numerical statistics utilities: compensated summation, moment
// aggregation, and chi-square goodness-of-fit machinery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace invstat {

// Kahan-Neumaier compensated accumulator.
class KahanSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased (n-1 denominator)
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

// Two-pass compensated mean/variance.  Deterministic for a fixed input
// order; callers that fill `xs` by trial index get schedule-independent
// results for free.
inline MomentSummary summarize(std::span<const double> xs) {
    MomentSummary m;
    m.count = xs.size();
    if (xs.empty()) return m;
    m.mean = compensated_sum(xs) / static_cast<double>(xs.size());
    if (xs.size() < 2) return m;
    KahanSum ss;
    for (double x : xs) {
        const double d = x - m.mean;
        ss.add(d * d);
    }
    m.variance = ss.value() / static_cast<double>(xs.size() - 1);
    m.stderr_mean = std::sqrt(m.variance / static_cast<double>(xs.size()));
    return m;
}

namespace detail {

// Regularized incomplete gamma Q(a,x) = Gamma(a,x)/Gamma(a).
// Series for x < a+1, continued fraction otherwise (classic gammp/gammq
// split); accurate to ~1e-14 over the chi-square range we use.
inline double lower_gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double upper_gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::lower_gamma_series(a, x);
    return detail::upper_gamma_cf(a, x);
}

// Upper tail of the chi-square distribution with df degrees of freedom.
inline double chi_square_p_value(double statistic, double df) {
    if (df <= 0.0) throw std::invalid_argument("chi_square_p_value: df must be positive");
    if (statistic <= 0.0) return 1.0;
    return gamma_q(df / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    std::size_t cells_used = 0;  // after pooling
};

namespace detail {

// Pool adjacent cells until every pooled cell has expected count >= min_expected.
// Returns (observed, expected) pooled vectors; order-preserving.
inline void pool_cells(std::vector<double>& obs, std::vector<double>& exp_,
                       double min_expected) {
    std::vector<double> po, pe;
    double co = 0.0, ce = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        co += obs[i];
        ce += exp_[i];
        if (ce >= min_expected) {
            po.push_back(co);
            pe.push_back(ce);
            co = ce = 0.0;
        }
    }
    if (ce > 0.0 || co > 0.0) {
        if (!pe.empty()) {
            po.back() += co;
            pe.back() += ce;
        } else {
            po.push_back(co);
            pe.push_back(ce);
        }
    }
    obs.swap(po);
    exp_.swap(pe);
}

}  // namespace detail

// Goodness of fit of observed counts against a fully specified expected
// distribution (counts, not probabilities). df = pooled cells - 1.
inline ChiSquareResult chi_square_gof(std::vector<double> observed,
                                      std::vector<double> expected,
                                      double min_expected = 5.0) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    detail::pool_cells(observed, expected, min_expected);
    if (observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: not enough cells after pooling");
    ChiSquareResult r;
    r.cells_used = observed.size();
    KahanSum stat;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) throw std::invalid_argument("chi_square_gof: zero expected cell");
        const double d = observed[i] - expected[i];
        stat.add(d * d / expected[i]);
    }
    r.statistic = stat.value();
    r.df = static_cast<double>(observed.size() - 1);
    r.p_value = chi_square_p_value(r.statistic, r.df);
    return r;
}

// Two-sample homogeneity test for multinomial counts over the same cells.
// Cells are pooled on combined expected mass. df = pooled cells - 1.
inline ChiSquareResult chi_square_two_sample(const std::vector<double>& a,
                                             const std::vector<double>& b,
                                             double min_expected = 5.0) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi_square_two_sample: size mismatch");
    const double na = std::accumulate(a.begin(), a.end(), 0.0);
    const double nb = std::accumulate(b.begin(), b.end(), 0.0);
    if (na <= 0.0 || nb <= 0.0)
        throw std::invalid_argument("chi_square_two_sample: empty sample");

    // Pool on the pooled-cell totals so both samples share one pooling.
    std::vector<std::size_t> group(a.size());
    {
        double run = 0.0;
        std::size_t g = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            run += a[i] + b[i];
            group[i] = g;
            // require the combined count to support min_expected in the
            // smaller sample when split proportionally
            const double smaller = std::min(na, nb) / (na + nb);
            if (run * smaller >= min_expected) {
                ++g;
                run = 0.0;
            }
        }
        if (run > 0.0 && g > 0) {
            for (std::size_t i = a.size(); i-- > 0;) {
                if (group[i] == g)
                    group[i] = g - 1;
                else
                    break;
            }
        }
    }
    const std::size_t ncells = group.empty() ? 0 : group.back() + 1;
    std::vector<double> pa(ncells, 0.0), pb(ncells, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[group[i]] += a[i];
        pb[group[i]] += b[i];
    }

    ChiSquareResult r;
    r.cells_used = ncells;
    if (ncells < 2) {
        // single outcome: the two samples trivially agree
        r.statistic = 0.0;
        r.df = 0.0;
        r.p_value = 1.0;
        return r;
    }
    KahanSum stat;
    for (std::size_t i = 0; i < ncells; ++i) {
        const double tot = pa[i] + pb[i];
        if (tot <= 0.0) continue;
        const double ea = na * tot / (na + nb);
        const double eb = nb * tot / (na + nb);
        stat.add((pa[i] - ea) * (pa[i] - ea) / ea);
        stat.add((pb[i] - eb) * (pb[i] - eb) / eb);
    }
    r.statistic = stat.value();
    r.df = static_cast<double>(ncells - 1);
    r.p_value = chi_square_p_value(r.statistic, r.df);
    return r;
}

}  // namespace invstat
