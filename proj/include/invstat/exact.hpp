#pragma once

// Closed-form and series evaluators for expected inversion counts, pair
// inversion probabilities, truncated laws, and the combinatorial
// identities behind the GEM and IID-product limits.  Includes the
// brute-force enumeration oracle for small n.
//
// Alternating sums with binomial coefficients are evaluated in quad
// precision: the summands grow like C(m, m/2) while the results are
// O(1/m^2), so double loses all significance near m = 40 and long
// double near m = 55.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "inversions.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace invstat {

#if defined(__SIZEOF_FLOAT128__)
using quad_float = __float128;
#else
using quad_float = long double;
#endif

struct SeriesValue {
    double value = 0.0;
    double truncation_error_bound = 0.0;
    std::size_t terms_used = 0;
    bool significance_loss = false;
};

template <class T>
struct FiniteDistribution {
    std::vector<T> support;
    std::vector<double> probs;

    void check_normalized(double tol = 1e-12) const {
        if (support.size() != probs.size())
            throw std::logic_error("FiniteDistribution: size mismatch");
        KahanSum s;
        for (double p : probs) {
            if (p < 0.0) throw std::logic_error("FiniteDistribution: negative probability");
            s.add(p);
        }
        if (std::abs(s.value() - 1.0) > tol)
            throw std::logic_error("FiniteDistribution: probabilities do not sum to 1");
    }
};

// ------------------------------------------------------------------
// Geometric weights: exact finite-n expectations
// ------------------------------------------------------------------

// E[I_n] under the biased law: sum_{k=1}^{n-1} (n-k) q^k / (1 + q^k).
inline double biased_geo_expected_inversions(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (n == 0) throw std::invalid_argument("need n >= 1");
    const double log_q = std::log(q);
    KahanSum s;
    for (std::size_t k = 1; k < n; ++k) {
        const double qk = std::exp(static_cast<double>(k) * log_q);
        s.add(static_cast<double>(n - k) * qk / (1.0 + qk));
    }
    return s.value();
}

// E[I_n] under the shifted (Mallows) law, from the independent truncated
// marginals: sum_{j=2}^n ( q/(1-q) - j q^j / (1-q^j) ).
inline double shifted_geo_expected_inversions(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (n == 0) throw std::invalid_argument("need n >= 1");
    const double log_q = std::log(q);
    const double head = q / (1.0 - q);
    KahanSum s;
    for (std::size_t j = 2; j <= n; ++j) {
        const double jlq = static_cast<double>(j) * log_q;
        const double qj = std::exp(jlq);
        const double one_minus_qj = -std::expm1(jlq);
        s.add(head - static_cast<double>(j) * qj / one_minus_qj);
    }
    return s.value();
}

// Compact variant that sums j = 1..n-1 with an (n-1) head factor.  It
// differs from the exact finite-n mean by q/(1-q) - n q^n/(1-q^n) (the
// two agree to leading order as n grows); kept for reference behind an
// explicit name.
inline double shifted_geo_expected_inversions_compact(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (n == 0) throw std::invalid_argument("need n >= 1");
    const double log_q = std::log(q);
    KahanSum s;
    s.add(q / (1.0 - q) * static_cast<double>(n - 1));
    for (std::size_t j = 1; j < n; ++j) {
        const double jlq = static_cast<double>(j) * log_q;
        s.add(-static_cast<double>(j) * std::exp(jlq) / -std::expm1(jlq));
    }
    return s.value();
}

// P(l) = (1-q) q^l / (1 - q^j) on {0, ..., j-1}.
inline FiniteDistribution<int> truncated_geometric_pmf(double q, std::size_t j) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (j == 0) throw std::invalid_argument("need j >= 1");
    FiniteDistribution<int> d;
    d.support.resize(j);
    d.probs.resize(j);
    const double log_q = std::log(q);
    const double norm = -std::expm1(static_cast<double>(j) * log_q);
    for (std::size_t l = 0; l < j; ++l) {
        d.support[l] = static_cast<int>(l);
        d.probs[l] = (1.0 - q) * std::exp(static_cast<double>(l) * log_q) / norm;
    }
    return d;
}

// ------------------------------------------------------------------
// General weights
// ------------------------------------------------------------------

// P(j appears before i) under the biased law, i.e. w_j / (w_i + w_j),
// evaluated in log scale so distant pairs stay accurate.
inline double biased_pair_inversion_prob(const WeightVector& wv, std::size_t i, std::size_t j) {
    if (i < 1 || j <= i || j > wv.size())
        throw std::invalid_argument("biased_pair_inversion_prob: need 1 <= i < j <= n");
    const double d = wv.log_w[i - 1] - wv.log_w[j - 1];  // log(w_i / w_j)
    if (d > 700.0) return std::exp(-d);
    return 1.0 / (1.0 + std::exp(d));
}

// E[I_n] under the shifted law for arbitrary weights:
// sum_{j=2}^n sum_{l<j} l w_{l+1} / prefix(j), computed in O(n).
inline double shifted_expected_inversions_general(const WeightVector& wv) {
    const std::size_t n = wv.size();
    KahanSum total;
    KahanSum weighted;  // sum_{l=0}^{j-1} l * w[l]
    for (std::size_t j = 2; j <= n; ++j) {
        weighted.add(static_cast<double>(j - 1) * wv.w[j - 1]);
        // weighted now covers l = 0..j-1
        total.add(weighted.value() / wv.prefix_sum(j));
    }
    return total.value();
}

// ------------------------------------------------------------------
// Enumeration oracles (small n)
// ------------------------------------------------------------------

inline constexpr std::size_t kMaxEnumerationN = 8;

// Exact shifted distribution over S_n for arbitrary weights:
// P(sigma) = prod_j w_{I_<j(sigma)+1} / prefix(j).
inline FiniteDistribution<Permutation> enumerate_shifted(const WeightVector& wv) {
    const std::size_t n = wv.size();
    if (n > kMaxEnumerationN)
        throw std::invalid_argument("enumerate_shifted: n capped at 8 (40320 states)");
    FiniteDistribution<Permutation> d;
    Permutation p = Permutation::identity(n);
    do {
        const InversionProfile pr = profile(p);
        double prob = 1.0;
        for (std::size_t j = 2; j <= n; ++j)
            prob *= wv.w[pr.by_j[j - 2]] / wv.prefix_sum(j);
        d.support.push_back(p);
        d.probs.push_back(prob);
    } while (std::next_permutation(p.seq.begin(), p.seq.end()));
    d.check_normalized(1e-9);
    return d;
}

// Mallows measure: P(sigma) proportional to q^{inv(sigma)}.
inline FiniteDistribution<Permutation> mallows_enumerate(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (n == 0 || n > kMaxEnumerationN)
        throw std::invalid_argument("mallows_enumerate: n capped at 8 (40320 states)");
    FiniteDistribution<Permutation> d;
    Permutation p = Permutation::identity(n);
    KahanSum z;
    do {
        const double w = std::pow(q, static_cast<double>(count_inversions(p)));
        d.support.push_back(p);
        d.probs.push_back(w);
        z.add(w);
    } while (std::next_permutation(p.seq.begin(), p.seq.end()));
    const double norm = z.value();
    for (double& pr : d.probs) pr /= norm;
    return d;
}

inline double expected_inversions(const FiniteDistribution<Permutation>& d) {
    KahanSum s;
    for (std::size_t i = 0; i < d.support.size(); ++i)
        s.add(d.probs[i] * static_cast<double>(count_inversions(d.support[i])));
    return s.value();
}

// P(position of j < position of i) under an enumerated law.
inline double pair_inversion_prob(const FiniteDistribution<Permutation>& d,
                                  std::uint32_t i, std::uint32_t j) {
    KahanSum s;
    for (std::size_t t = 0; t < d.support.size(); ++t) {
        const auto& seq = d.support[t].seq;
        for (auto v : seq) {
            if (v == j) {
                s.add(d.probs[t]);
                break;
            }
            if (v == i) break;
        }
    }
    return s.value();
}

// ------------------------------------------------------------------
// GEM biased pair terms (double series with controlled cancellation)
// ------------------------------------------------------------------

namespace detail {

inline quad_float quad_pow_int(quad_float base, std::size_t e) {
    quad_float r = 1;
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// E[alpha_k^r] = (theta/(theta+r))^(k-1) / C(theta+r, r) where alpha_k is
// the product (1-W_2)...(1-W_k) W_{k+1} of independent Beta(1,theta)
// variables.  C(theta+r, r) = prod_{l=1}^r (theta+l)/l.
inline std::vector<quad_float> alpha_moments(double theta, std::size_t k, std::size_t rmax) {
    std::vector<quad_float> ea(rmax + 1);
    const quad_float th = theta;
    quad_float binom = 1;  // C(theta + r, r)
    ea[0] = 1;
    for (std::size_t r = 1; r <= rmax; ++r) {
        binom *= (th + static_cast<quad_float>(r)) / static_cast<quad_float>(r);
        ea[r] = quad_pow_int(th / (th + static_cast<quad_float>(r)),
                             k - 1) / binom;
    }
    return ea;
}

// Tail of theta * sum_{m>M} E[alpha (1-alpha)^m] / (m+theta+1), using
// E[alpha(1-alpha)^m] <= min(E alpha, 1/(e m)).
inline double gem_pair_m_tail_bound(double theta, double e_alpha, std::size_t M) {
    const double inv_e = 0.36787944117144233;
    const double m_star = inv_e / e_alpha;  // crossover of the two envelopes
    double bound;
    if (m_star <= static_cast<double>(M + 1)) {
        // 1/(e m) envelope everywhere past M
        bound = inv_e / static_cast<double>(M + 1);
    } else {
        const double head = e_alpha * std::log((m_star + theta + 1.0) /
                                               (static_cast<double>(M) + theta + 1.0));
        const double rest = inv_e / (m_star + 1.0);
        bound = head + rest;
    }
    return theta * bound;
}

}  // namespace detail

// One term of the GEM-biased pair-probability series:
//   1 - E[ 1 / (1 + ((1-W_1)/W_1)(1-W_2)...(1-W_k) W_{k+1}) ]
// evaluated as theta * sum_m E[alpha_k (1-alpha_k)^m] / (m+theta+1) with
// the inner expectation expanded through the moments of alpha_k.  The
// inner alternating sums are positive and shrink like 1/m^2; evaluation
// stops early (with the remainder folded into the bound) once they sink
// below 1e-12 of their largest summand.
inline SeriesValue gem_biased_pair_term(double theta, std::size_t k, std::size_t m_max) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("gem_biased_pair_term: theta must be positive");
    if (k == 0) throw std::invalid_argument("gem_biased_pair_term: k >= 1");

    const auto ea = detail::alpha_moments(theta, k, m_max + 1);
    const double e_alpha = static_cast<double>(ea[1]);

#if defined(__SIZEOF_FLOAT128__)
    constexpr double kWorkEps = 1.9e-34;
#else
    constexpr double kWorkEps = 1.1e-19;
#endif

    SeriesValue out;
    quad_float acc = 0;
    std::size_t stop = m_max + 1;  // first m not included
    for (std::size_t m = 0; m <= m_max; ++m) {
        // inner_m = sum_{i=0}^m (-1)^i C(m,i) E[alpha^{i+1}] = E[alpha (1-alpha)^m]
        quad_float inner = 0;
        quad_float binom = 1;  // C(m, i)
        quad_float max_term = 0;
        for (std::size_t i = 0; i <= m; ++i) {
            const quad_float term = binom * ea[i + 1];
            if (term > max_term) max_term = term;
            inner += (i % 2 == 0) ? term : -term;
            binom = binom * static_cast<quad_float>(m - i) / static_cast<quad_float>(i + 1);
        }
        // stop once cancellation roundoff could exceed 0.1% of the value;
        // the discarded terms are folded into the truncation bound
        if (inner <= max_term * static_cast<quad_float>(1e3 * kWorkEps)) {
            if (inner <= max_term * static_cast<quad_float>(1e-12)) out.significance_loss = true;
            stop = m;
            break;
        }
        acc += inner / (static_cast<quad_float>(m) + static_cast<quad_float>(theta) + 1);
        out.terms_used = m + 1;
    }
    out.value = static_cast<double>(static_cast<quad_float>(theta) * acc);
    const std::size_t M = stop == m_max + 1 ? m_max : (stop == 0 ? 0 : stop - 1);
    out.truncation_error_bound = detail::gem_pair_m_tail_bound(theta, e_alpha, M);
    return out;
}

// Partial sum over k of gem_biased_pair_term with a rigorous bound on the
// discarded k-tail.  Each whole term is at most
// E[sqrt(Z alpha_k)] = E[Z^1/2] E[W^1/2] (theta/(theta+1/2))^(k-1)
// (from x/(1+x) <= sqrt(x)), which decays geometrically.
inline SeriesValue gem_biased_total(double theta, std::size_t k_max, std::size_t m_max = 400) {
    if (k_max == 0) throw std::invalid_argument("gem_biased_total: k_max >= 1");
    SeriesValue out;
    KahanSum sum;
    KahanSum bound;
    for (std::size_t k = 1; k <= k_max; ++k) {
        const SeriesValue term = gem_biased_pair_term(theta, k, m_max);
        sum.add(term.value);
        bound.add(term.truncation_error_bound);
        out.significance_loss = out.significance_loss || term.significance_loss;
        out.terms_used += term.terms_used;
    }
    const double ez_half =
        theta * std::exp(std::lgamma(0.5) + std::lgamma(theta + 0.5) - std::lgamma(theta + 1.0));
    const double ew_half =
        std::exp(std::lgamma(1.5) + std::lgamma(theta + 1.0) - std::lgamma(theta + 1.5));
    const double rho = theta / (theta + 0.5);
    const double k_tail =
        ez_half * ew_half * std::pow(rho, static_cast<double>(k_max)) / (1.0 - rho);
    out.value = sum.value();
    out.truncation_error_bound = bound.value() + k_tail;
    return out;
}

// ------------------------------------------------------------------
// Binomial-ratio identity: sum_i (-1)^i C(m,i)/C(theta+i,i) = theta/(m+theta)
// ------------------------------------------------------------------

struct BinomIdentityValue {
    double lhs = 0.0;
    double rhs = 0.0;
    bool cancellation_flagged = false;
};

inline BinomIdentityValue binom_ratio_identity(double theta, std::size_t m) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("binom_ratio_identity: theta must be positive");
    BinomIdentityValue out;
    const quad_float th = theta;
    quad_float sum = 0;
    quad_float binom_m = 1;      // C(m, i)
    quad_float binom_theta = 1;  // C(theta+i, i) as a running product
    quad_float max_term = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        const quad_float term = binom_m / binom_theta;
        if (term > max_term) max_term = term;
        sum += (i % 2 == 0) ? term : -term;
        binom_m = binom_m * static_cast<quad_float>(m - i) / static_cast<quad_float>(i + 1);
        binom_theta *= (th + static_cast<quad_float>(i + 1)) / static_cast<quad_float>(i + 1);
    }
    out.lhs = static_cast<double>(sum);
    out.rhs = theta / (static_cast<double>(m) + theta);
    // flag when quad roundoff could reach 1e-12 of the result
    const double eps = 1.9e-34;
    const double roundoff =
        eps * static_cast<double>(max_term) * static_cast<double>(m + 1);
    out.cancellation_flagged = roundoff > 1e-12 * std::max(std::abs(out.lhs), 1e-300);
    return out;
}

// Partial sum of sum_m (inner identity)/(m+theta+1) in its telescoped
// form theta * sum_m ( 1/(m+theta) - 1/(m+theta+1) ) = 1 - theta/(M+theta+1).
inline double identity_total_partial(double theta, std::size_t m_terms) {
    if (!(theta > 0.0)) throw std::invalid_argument("identity_total_partial: theta > 0");
    return 1.0 - theta / (static_cast<double>(m_terms) + theta);
}

// ------------------------------------------------------------------
// IID-product series
// ------------------------------------------------------------------

namespace detail {

// Cohen-Rodriguez Villegas-Zagier acceleration for alternating series
// sum_{j>=0} (-1)^j a_j with totally monotone a_j (here: moments of a
// [0,1] random variable).  Error <= 3 a_0 / (3+sqrt(8))^n.
template <class TermFn>
double sumalt(const TermFn& a, int n, double& err_bound) {
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    d = (d + 1.0 / d) / 2.0;
    double b = -1.0, c = -d, s = 0.0;
    for (int j = 0; j < n; ++j) {
        c = b - c;
        s += c * a(j);
        b = (j + n) * (j - n) * b / ((j + 0.5) * (j + 1.0));
    }
    err_bound = 3.0 * a(0) / d;
    return s / d;
}

}  // namespace detail

// Pair term 1 - E[1/(1 + prod_{l<=k} U_l^(1/theta))]
//         = sum_{m>=1} (-1)^(m-1) (theta/(m+theta))^k.
// Direct alternating summation with first-omitted-term remainder where
// cheap; series acceleration for the slowly converging small-k cases.
inline SeriesValue iid_prod_pair_term(double theta, std::size_t k, double tol) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("iid_prod_pair_term: theta must be positive");
    if (k == 0) throw std::invalid_argument("iid_prod_pair_term: k >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("iid_prod_pair_term: tol must be positive");

    auto a = [&](double m) {  // a(m) = (theta/(m+theta))^k, m >= 1
        return std::pow(theta / (m + theta), static_cast<double>(k));
    };

    SeriesValue out;
    // terms needed for direct summation: a(M) <= tol
    const double direct_terms = theta * (std::pow(tol, -1.0 / static_cast<double>(k)) - 1.0);
    if (direct_terms <= 1e5) {
        KahanSum s;
        double m = 1.0;
        double t = a(m);
        while (t > tol) {
            s.add(std::fmod(m, 2.0) == 1.0 ? t : -t);
            m += 1.0;
            t = a(m);
        }
        out.truncation_error_bound = t;  // alternating, terms decreasing
        out.value = s.value();
        out.terms_used = static_cast<std::size_t>(m - 1.0);
        return out;
    }

    // accelerated path
    const double a0 = a(1.0);
    int n = 20;
    double d = std::pow(3.0 + std::sqrt(8.0), n);
    while (3.0 * a0 / d > tol && n < 200) {
        n += 10;
        d = std::pow(3.0 + std::sqrt(8.0), n);
    }
    double err = 0.0;
    out.value = detail::sumalt([&](int j) { return a(static_cast<double>(j + 1)); }, n, err);
    out.truncation_error_bound = err;
    out.terms_used = static_cast<std::size_t>(n);
    return out;
}

// sum_k of the pair terms = theta log 2; the k-tail after K terms lies in
// [0, (1+theta)(theta/(1+theta))^(K+1)].
inline SeriesValue iid_prod_total(double theta, double tol) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("iid_prod_total: theta must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("iid_prod_total: tol must be positive");
    const double ratio = theta / (1.0 + theta);
    std::size_t K = 1;
    while ((1.0 + theta) * std::pow(ratio, static_cast<double>(K + 1)) > tol / 2.0) {
        ++K;
        if (K > 100000) throw std::runtime_error("iid_prod_total: tolerance unreachable");
    }
    const double per_term_tol = tol / (2.0 * static_cast<double>(K));
    SeriesValue out;
    KahanSum sum;
    KahanSum bound;
    for (std::size_t k = 1; k <= K; ++k) {
        const SeriesValue term = iid_prod_pair_term(theta, k, per_term_tol);
        sum.add(term.value);
        bound.add(term.truncation_error_bound);
        out.terms_used += term.terms_used;
    }
    out.value = sum.value();
    out.truncation_error_bound =
        bound.value() + (1.0 + theta) * std::pow(ratio, static_cast<double>(K + 1));
    return out;
}

// ------------------------------------------------------------------
// GEM shifted series
// ------------------------------------------------------------------

// k-th summand of the shifted GEM limit: k (1/(1+theta)) (theta/(1+theta))^k.
inline double gem_shifted_term(double theta, std::size_t k) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("gem_shifted_term: theta must be positive");
    if (k == 0) throw std::invalid_argument("gem_shifted_term: k >= 1");
    const double x = theta / (1.0 + theta);
    return static_cast<double>(k) / (1.0 + theta) *
           std::pow(x, static_cast<double>(k));
}

// Partial sum over k with the exact geometric-series remainder as bound.
inline SeriesValue gem_shifted_total(double theta, std::size_t k_max) {
    if (k_max == 0) throw std::invalid_argument("gem_shifted_total: k_max >= 1");
    SeriesValue out;
    KahanSum s;
    for (std::size_t k = 1; k <= k_max; ++k) s.add(gem_shifted_term(theta, k));
    const double x = theta / (1.0 + theta);
    // sum_{k>K} k x^k = x^{K+1} ((K+1) - K x) / (1-x)^2
    const double tail = std::pow(x, static_cast<double>(k_max + 1)) *
                        (static_cast<double>(k_max + 1) - static_cast<double>(k_max) * x) /
                        ((1.0 - x) * (1.0 - x));
    out.value = s.value();
    out.truncation_error_bound = tail / (1.0 + theta);
    out.terms_used = k_max;
    return out;
}

}  // namespace invstat
