#pragma once

// Random permutation constructions over a fixed weight vector.
//
// Biased: the order in which distinct values appear in an IID stream
// from the weights; sampled by the exponential-race equivalence
// (sort exp(1)/w_k ascending), computed in log scale so that tiny
// weights cannot underflow the keys.  A literal sequential-rejection
// implementation is kept for cross-validation.
//
// Shifted: each new value is placed through the increasing bijection
// onto the unused values.  Sampled by the insertion construction
// (each j lands at the (I_<j + 1)-th rightmost slot, I_<j drawn from
// the truncated law); the literal stream construction is retained as
// a test oracle since its rejection loop has unbounded running time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "inversions.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace invstat {

namespace detail {

// Index in [0, j) distributed as w_{l+1} / prefix(j); lower_bound breaks
// inverse-CDF ties toward the smaller index.
template <class RngT>
std::uint32_t truncated_weight_index(const WeightVector& wv, std::size_t j, RngT& rng) {
    const double target = rng.uniform01() * wv.prefix_sum(j);
    const auto begin = wv.prefix.begin();
    const auto it = std::lower_bound(begin, begin + static_cast<std::ptrdiff_t>(j), target);
    const auto idx = static_cast<std::uint32_t>(it - begin);
    return idx < j ? idx : static_cast<std::uint32_t>(j - 1);
}

// Truncated geometric on {0..j-1}: P(l) = (1-q) q^l / (1-q^j), via the
// closed-form inverse CDF.  O(1) given A = 1 - q^j.
inline std::uint32_t truncated_geometric_index(double inv_log_q, double one_minus_qj,
                                               std::size_t j, double u) {
    // smallest l with 1 - q^{l+1} >= u (1 - q^j)
    const double r = std::log1p(-u * one_minus_qj) * inv_log_q;
    auto l = static_cast<std::int64_t>(std::ceil(r)) - 1;
    if (l < 0) l = 0;
    if (l >= static_cast<std::int64_t>(j)) l = static_cast<std::int64_t>(j) - 1;
    return static_cast<std::uint32_t>(l);
}

}  // namespace detail

// ------------------------------------------------------------------
// Biased construction
// ------------------------------------------------------------------

// Size-biased order of [n] via the exponential race, O(n log n).
template <class RngT = Rng>
Permutation sample_biased(const WeightVector& wv, RngT& rng) {
    const std::size_t n = wv.size();
    std::vector<std::pair<double, std::uint32_t>> keys(n);
    for (std::size_t k = 0; k < n; ++k)
        keys[k] = {std::log(rng.exponential()) - wv.log_w[k],
                   static_cast<std::uint32_t>(k + 1)};
    std::sort(keys.begin(), keys.end());
    Permutation perm;
    perm.seq.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm.seq[i] = keys[i].second;
    return perm;
}

// Same law by literal sequential rejection against the prefix sums.
// Running time is unbounded (geometric); intended for cross-validation
// at small n.
template <class RngT = Rng>
Permutation sample_biased_rejection(const WeightVector& wv, RngT& rng) {
    const std::size_t n = wv.size();
    Permutation perm;
    perm.seq.reserve(n);
    std::vector<bool> used(n + 1, false);
    while (perm.seq.size() < n) {
        const std::uint32_t value = detail::truncated_weight_index(wv, n, rng) + 1;
        if (!used[value]) {
            used[value] = true;
            perm.seq.push_back(value);
        }
    }
    return perm;
}

// ------------------------------------------------------------------
// Shifted construction
// ------------------------------------------------------------------

// Draw the inversion profile directly: I_<j independent with
// P(I_<j = l) = w_{l+1} / prefix(j).  O(n) for geometric weights,
// O(n log n) otherwise.  Visitor receives (j, I_<j) for j = 2..n.
template <class RngT, class Visitor>
void visit_shifted_profile(const WeightVector& wv, RngT& rng, Visitor&& visit) {
    const std::size_t n = wv.size();
    if (n < 2) return;
    if (wv.geometric_q) {
        const double q = *wv.geometric_q;
        const double log_q = std::log(q);
        const double inv_log_q = 1.0 / log_q;
        for (std::size_t j = 2; j <= n; ++j) {
            const double one_minus_qj = -std::expm1(static_cast<double>(j) * log_q);
            visit(j, detail::truncated_geometric_index(inv_log_q, one_minus_qj, j,
                                                       rng.uniform01()));
        }
    } else {
        for (std::size_t j = 2; j <= n; ++j)
            visit(j, detail::truncated_weight_index(wv, j, rng));
    }
}

template <class RngT = Rng>
InversionProfile sample_inversion_profile_shifted(const WeightVector& wv, RngT& rng) {
    InversionProfile pr;
    if (wv.size() >= 2) pr.by_j.resize(wv.size() - 1);
    visit_shifted_profile(wv, rng, [&pr](std::size_t j, std::uint32_t inv) {
        pr.by_j[j - 2] = inv;
        pr.total += inv;
    });
    return pr;
}

// Total inversion count only; avoids materializing the profile.
template <class RngT = Rng>
std::uint64_t sample_inversion_total_shifted(const WeightVector& wv, RngT& rng) {
    std::uint64_t total = 0;
    visit_shifted_profile(wv, rng, [&total](std::size_t, std::uint32_t inv) { total += inv; });
    return total;
}

// Insertion construction: draw I_<j for j = 2..n and materialize the
// permutation.  By construction the profile of the result equals the
// drawn values.
template <class RngT = Rng>
Permutation sample_shifted_insertion(const WeightVector& wv, RngT& rng) {
    if (wv.size() == 0) throw std::invalid_argument("sample_shifted_insertion: empty weights");
    return permutation_from_profile(sample_inversion_profile_shifted(wv, rng));
}

// Core of the stream construction, parameterized over the raw value
// stream so tests can force literal sequences.  next_value() yields a
// 1-based index m; with r values remaining, m > r is ignored and
// otherwise the m-th smallest remaining value is emitted.
template <class NextValue>
Permutation shifted_stream_from_values(std::size_t n, NextValue&& next_value) {
    Permutation perm;
    perm.seq.reserve(n);
    detail::FenwickTree remaining(n);
    for (std::size_t i = 1; i <= n; ++i) remaining.add(i, 1);
    for (std::size_t r = n; r >= 1; --r) {
        std::uint64_t m;
        do {
            m = next_value();
        } while (m > r);
        const std::size_t value = remaining.kth(static_cast<std::int64_t>(m));
        perm.seq.push_back(static_cast<std::uint32_t>(value));
        remaining.add(value, -1);
    }
    return perm;
}

// Reference implementation of the stream construction restricted to [n]:
// draw m proportional to w_1..w_n and accept iff m <= #remaining.
// Conditioning makes this equivalent to drawing m <= r proportional to
// w_1..w_r, which is how the insertion construction sees it.
template <class RngT = Rng>
Permutation sample_shifted_stream(const WeightVector& wv, RngT& rng) {
    const std::size_t n = wv.size();
    if (n == 0) throw std::invalid_argument("sample_shifted_stream: empty weights");
    return shifted_stream_from_values(n, [&]() -> std::uint64_t {
        return detail::truncated_weight_index(wv, n, rng) + 1;
    });
}

}  // namespace invstat
