#pragma once

// Monte Carlo estimation and statistical checks that confront the
// samplers with the exact and asymptotic predictions.
//
// Determinism contract: every trial runs on substream (seed, index), all
// per-trial results are stored by index and reduced in index order, so a
// report is a pure function of (config, seed) regardless of --threads.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "exact.hpp"
#include "inversions.hpp"
#include "parallel.hpp"
#include "samplers.hpp"
#include "stats.hpp"
#include "weights.hpp"

namespace invstat {

inline constexpr double kAlpha = 0.01;  // significance level used throughout

// stream indices reserved for non-trial draws (weight realizations that
// must be shared across trials)
inline constexpr std::uint64_t kRealizationStreamBase = 0x8000000000000000ull;

struct EstimatorReport {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
    std::size_t trials = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string model;
};

struct TestResult {
    std::string name;
    double statistic = 0.0;
    std::optional<double> p_value;
    bool passed = false;
    std::string details;
};

namespace detail {

inline void guard_workload(std::size_t n, std::size_t trials) {
    if (trials < 2) throw std::invalid_argument("need at least 2 trials");
    if (static_cast<double>(n) * static_cast<double>(trials) > 2e10)
        throw std::invalid_argument("n * trials exceeds the resource guard (2e10)");
}

// One trial's inversion total for the given regime at size n.
inline std::uint64_t inversion_total_trial(const RegimeSpec& spec, std::size_t n,
                                           const WeightVector* fixed_wv, Rng& rng) {
    std::uint64_t total = 0;
    const WeightVector* wv = fixed_wv;
    WeightVector local;
    if (wv == nullptr) {
        local = realize(spec.weight_model_at(n), n, rng);
        wv = &local;
    }
    if (spec.construction == Construction::Shifted) {
        total = sample_inversion_total_shifted(*wv, rng);
    } else {
        total = count_inversions(sample_biased(*wv, rng));
    }
    return total;
}

}  // namespace detail

// Mean/variance of I_n over independent trials.  Random weight models are
// re-realized per trial (annealed); pass conditional_wv to hold one
// realization fixed instead.
inline EstimatorReport estimate_mean_inversions(const RegimeSpec& spec, std::size_t n,
                                                std::size_t trials, std::uint64_t seed,
                                                unsigned threads = 0,
                                                const WeightVector* conditional_wv = nullptr,
                                                std::uint64_t stream_base = 0) {
    spec.validate();
    detail::guard_workload(n, trials);

    // deterministic models: realize once, share across trials
    WeightVector shared;
    const WeightVector* fixed_wv = conditional_wv;
    if (fixed_wv == nullptr && !spec.weight_model_at(n).is_random()) {
        Rng dummy(seed, kRealizationStreamBase);
        shared = realize(spec.weight_model_at(n), n, dummy);
        fixed_wv = &shared;
    }

    std::vector<double> totals(trials);
    parallel_trials(trials, threads, [&](std::size_t t) {
        Rng rng(seed, stream_base + t);
        totals[t] = static_cast<double>(detail::inversion_total_trial(spec, n, fixed_wv, rng));
    });

    const MomentSummary m = summarize(totals);
    EstimatorReport rep;
    rep.mean = m.mean;
    rep.variance = m.variance;
    rep.stderr_mean = m.stderr_mean;
    rep.ci95_lo = m.mean - 1.96 * m.stderr_mean;
    rep.ci95_hi = m.mean + 1.96 * m.stderr_mean;
    rep.trials = trials;
    rep.n = n;
    rep.seed = seed;
    rep.model = spec.describe();
    return rep;
}

// ------------------------------------------------------------------
// Dominance of the shifted pair-inversion probability
// ------------------------------------------------------------------

enum class DominanceMode { Exact, MonteCarlo };

// Shifted pair probabilities dominate biased ones; strictly when the
// values are at least 2 apart, with equality allowed for adjacent pairs.
inline TestResult dominance_check(double q, std::size_t n, DominanceMode mode,
                                  std::size_t trials = 0, std::uint64_t seed = 0,
                                  unsigned threads = 0) {
    TestResult res;
    res.name = "dominance";
    const WeightVector wv = geometric_weights(q, n);

    if (mode == DominanceMode::Exact) {
        if (n > kMaxEnumerationN)
            throw std::invalid_argument("dominance_check: exact mode capped at n = 8");
        const auto dist = mallows_enumerate(q, n);
        double min_adjacent_gap = 1.0;   // |shifted - biased| for j-i = 1
        double min_strict_margin = 1.0;  // shifted - biased for j-i >= 2
        bool ok = true;
        std::ostringstream details;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = i + 1; j <= n; ++j) {
                const double pb = biased_pair_inversion_prob(wv, i, j);
                const double ps = pair_inversion_prob(dist, static_cast<std::uint32_t>(i),
                                                      static_cast<std::uint32_t>(j));
                if (j - i == 1) {
                    min_adjacent_gap = std::min(min_adjacent_gap, std::abs(ps - pb));
                    if (std::abs(ps - pb) > 1e-12) {
                        ok = false;
                        details << "adjacent pair (" << i << "," << j << ") differs by "
                                << ps - pb << "; ";
                    }
                } else {
                    min_strict_margin = std::min(min_strict_margin, ps - pb);
                    if (ps - pb < 1e-12) {
                        ok = false;
                        details << "pair (" << i << "," << j << ") margin " << ps - pb << "; ";
                    }
                }
            }
        }
        res.statistic = min_strict_margin;
        res.passed = ok;
        std::ostringstream sum;
        sum << "q=" << q << " n=" << n << " exact; min strict margin " << min_strict_margin
            << ", max adjacent gap " << min_adjacent_gap << ". " << details.str();
        res.details = sum.str();
        return res;
    }

    if (trials < 2) throw std::invalid_argument("dominance_check: monte carlo needs trials");
    detail::guard_workload(n, trials);
    const std::size_t npairs = n * (n - 1) / 2;
    std::vector<std::uint8_t> hits(trials * npairs);
    parallel_trials(trials, threads, [&](std::size_t t) {
        Rng rng(seed, t);
        const Permutation perm = sample_shifted_insertion(wv, rng);
        std::vector<std::uint32_t> pos(n + 1);
        for (std::size_t idx = 0; idx < n; ++idx) pos[perm.seq[idx]] = static_cast<std::uint32_t>(idx);
        std::size_t pair = 0;
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j, ++pair)
                hits[t * npairs + pair] = pos[j] < pos[i] ? 1 : 0;
    });

    double worst_z = -1e30;
    bool ok = true;
    std::ostringstream details;
    std::size_t pair = 0;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = i + 1; j <= n; ++j, ++pair) {
            std::uint64_t count = 0;
            for (std::size_t t = 0; t < trials; ++t) count += hits[t * npairs + pair];
            const double phat = static_cast<double>(count) / static_cast<double>(trials);
            const double se = std::sqrt(std::max(phat * (1.0 - phat), 1e-12) /
                                        static_cast<double>(trials));
            const double pb = biased_pair_inversion_prob(wv, i, j);
            const double z = (pb - phat) / se;  // positive = violation direction
            worst_z = std::max(worst_z, z);
            if (z > 3.0) {
                ok = false;
                details << "pair (" << i << "," << j << ") z=" << z << "; ";
            }
        }
    }
    res.statistic = worst_z;
    res.passed = ok;
    std::ostringstream sum;
    sum << "q=" << q << " n=" << n << " mc trials=" << trials << "; worst violation z "
        << worst_z << ". " << details.str();
    res.details = sum.str();
    return res;
}

// ------------------------------------------------------------------
// Independence of the per-value inversion counts
// ------------------------------------------------------------------

enum class ProfileSource { ShiftedInsertion, BiasedControl };

// Marginal goodness of fit of each I_<j against the truncated law, plus
// pairwise independence on joint contingency tables.  Profiles are
// recomputed from materialized permutations.
inline TestResult independence_test(const WeightVector& wv, std::size_t n, std::size_t trials,
                                    std::uint64_t seed, unsigned threads = 0,
                                    ProfileSource source = ProfileSource::ShiftedInsertion) {
    if (n < 3) throw std::invalid_argument("independence_test: n >= 3");
    if (n != wv.size()) throw std::invalid_argument("independence_test: wv size mismatch");
    detail::guard_workload(n, trials);

    std::vector<std::uint32_t> profiles(trials * (n - 1));
    parallel_trials(trials, threads, [&](std::size_t t) {
        Rng rng(seed, t);
        const Permutation perm = source == ProfileSource::ShiftedInsertion
                                     ? sample_shifted_insertion(wv, rng)
                                     : sample_biased(wv, rng);
        const InversionProfile pr = profile(perm);
        for (std::size_t idx = 0; idx + 1 < n; ++idx)
            profiles[t * (n - 1) + idx] = pr.by_j[idx];
    });

    auto marginal_prob = [&wv](std::size_t j, std::size_t l) {
        return wv.w[l] / wv.prefix_sum(j);
    };

    TestResult res;
    res.name = "independence";
    double min_p = 1.0;
    bool ok = true;
    std::ostringstream details;

    // (a) marginals
    for (std::size_t j = 2; j <= n; ++j) {
        std::vector<double> observed(j, 0.0), expected(j, 0.0);
        for (std::size_t t = 0; t < trials; ++t)
            observed[profiles[t * (n - 1) + (j - 2)]] += 1.0;
        for (std::size_t l = 0; l < j; ++l)
            expected[l] = static_cast<double>(trials) * marginal_prob(j, l);
        const auto gof = chi_square_gof(observed, expected);
        min_p = std::min(min_p, gof.p_value);
        if (gof.p_value < kAlpha) {
            ok = false;
            details << "marginal j=" << j << " p=" << gof.p_value << "; ";
        }
    }

    // (b) pairwise joints vs product of exact marginals
    for (std::size_t j = 2; j <= n; ++j) {
        for (std::size_t j2 = j + 1; j2 <= n; ++j2) {
            std::vector<double> observed(j * j2, 0.0), expected(j * j2, 0.0);
            for (std::size_t t = 0; t < trials; ++t) {
                const std::uint32_t a = profiles[t * (n - 1) + (j - 2)];
                const std::uint32_t b = profiles[t * (n - 1) + (j2 - 2)];
                observed[a * j2 + b] += 1.0;
            }
            for (std::size_t a = 0; a < j; ++a)
                for (std::size_t b = 0; b < j2; ++b)
                    expected[a * j2 + b] = static_cast<double>(trials) * marginal_prob(j, a) *
                                           marginal_prob(j2, b);
            const auto gof = chi_square_gof(observed, expected);
            min_p = std::min(min_p, gof.p_value);
            if (gof.p_value < kAlpha) {
                ok = false;
                details << "joint (" << j << "," << j2 << ") p=" << gof.p_value << "; ";
            }
        }
    }

    res.statistic = min_p;
    res.p_value = min_p;
    res.passed = ok;
    std::ostringstream sum;
    sum << "n=" << n << " trials=" << trials << " source="
        << (source == ProfileSource::ShiftedInsertion ? "shifted" : "biased-control")
        << "; min p " << min_p << ". " << details.str();
    res.details = sum.str();
    return res;
}

// ------------------------------------------------------------------
// Weak-law scaling checks
// ------------------------------------------------------------------

struct WeakLawRow {
    std::size_t n = 0;
    double scaled_mean = 0.0;
    double scaled_sd = 0.0;
    double cv = 0.0;
};

struct WeakLawResult {
    TestResult test;
    std::vector<WeakLawRow> rows;
    double predicted = 0.0;
    double scale_exponent = 1.0;
};

// Scaled mean against the predicted constant at the largest n, plus a
// decreasing coefficient of variation along the grid.  For conditional
// mode (random weights, one realization) the target is the exact
// conditional mean of the realized weights.
inline WeakLawResult weak_law_check(const RegimeSpec& spec, std::vector<std::size_t> n_grid,
                                    std::size_t trials, std::uint64_t seed,
                                    double rel_tol = 0.05, unsigned threads = 0,
                                    bool conditional = false) {
    spec.validate();
    if (n_grid.size() < 2) throw std::invalid_argument("weak_law_check: need a grid");
    std::sort(n_grid.begin(), n_grid.end());

    WeakLawResult out;
    const std::size_t n_max = n_grid.back();

    WeightVector realization;
    if (conditional) {
        if (!spec.weight_model_at(n_max).is_random())
            throw std::invalid_argument("conditional mode needs a random weight model");
        Rng rng(seed, kRealizationStreamBase + 1);
        realization = realize(spec.weight_model_at(n_max), n_max, rng);
    } else {
        const ScalingPrediction pred = predicted_scaled_expectation(spec);
        out.predicted = pred.constant;
        out.scale_exponent = pred.scale_exponent;
    }

    bool cv_decreasing = true;
    double prev_cv = 0.0;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::size_t n = n_grid[gi];
        WeightVector truncated;
        const WeightVector* cond = nullptr;
        if (conditional) {
            truncated.w.assign(realization.w.begin(),
                               realization.w.begin() + static_cast<std::ptrdiff_t>(n));
            truncated.log_w.assign(realization.log_w.begin(),
                                   realization.log_w.begin() + static_cast<std::ptrdiff_t>(n));
            truncated.prefix.assign(realization.prefix.begin(),
                                    realization.prefix.begin() + static_cast<std::ptrdiff_t>(n));
            cond = &truncated;
        }
        const EstimatorReport rep = estimate_mean_inversions(
            spec, n, trials, seed, threads, cond, gi * trials);
        const double scale = std::pow(static_cast<double>(n),
                                      conditional ? 1.0 : out.scale_exponent);
        WeakLawRow row;
        row.n = n;
        row.scaled_mean = rep.mean / scale;
        row.scaled_sd = std::sqrt(rep.variance) / scale;
        row.cv = row.scaled_sd / std::abs(row.scaled_mean);
        out.rows.push_back(row);
        if (gi > 0 && row.cv >= prev_cv) cv_decreasing = false;
        prev_cv = row.cv;

        if (conditional && gi + 1 == n_grid.size())
            out.predicted = shifted_expected_inversions_general(truncated) /
                            static_cast<double>(n);
    }
    if (conditional) out.scale_exponent = 1.0;

    const double final_mean = out.rows.back().scaled_mean;
    const double rel_err = std::abs(final_mean - out.predicted) / std::abs(out.predicted);
    out.test.name = "weak_law";
    out.test.statistic = rel_err;
    out.test.passed = rel_err <= rel_tol && cv_decreasing;
    std::ostringstream details;
    details << spec.describe() << (conditional ? " conditional" : "") << "; scaled mean "
            << final_mean << " vs " << out.predicted << " (rel err " << rel_err
            << ", tol " << rel_tol << "), cv " << (cv_decreasing ? "decreasing" : "NOT decreasing")
            << " over";
    for (const auto& r : out.rows) details << " " << r.n << ":" << r.cv;
    out.test.details = details.str();
    return out;
}

// ------------------------------------------------------------------
// Sampler equivalence
// ------------------------------------------------------------------

namespace detail {

// Lehmer rank of a permutation of [n], for indexing the n! cells.
inline std::size_t permutation_rank(const Permutation& p) {
    const std::size_t n = p.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller_later = 0;
        for (std::size_t j = i + 1; j < n; ++j)
            if (p.seq[j] < p.seq[i]) ++smaller_later;
        rank = rank * (n - i) + smaller_later;
    }
    return rank;
}

}  // namespace detail

// Chi-square homogeneity over all n! outcomes: stream vs insertion for
// the shifted construction, race vs rejection for the biased one.
inline TestResult sampler_equivalence_test(const WeightVector& wv, std::size_t trials,
                                           std::uint64_t seed, unsigned threads = 0) {
    const std::size_t n = wv.size();
    if (n > 5) throw std::invalid_argument("sampler_equivalence_test: n <= 5");
    detail::guard_workload(n, trials);
    std::size_t factorial = 1;
    for (std::size_t i = 2; i <= n; ++i) factorial *= i;

    // four independent sample blocks
    std::vector<std::uint32_t> ranks(4 * trials);
    parallel_trials(4 * trials, threads, [&](std::size_t t) {
        Rng rng(seed, t);
        const std::size_t which = t / trials;
        Permutation perm;
        switch (which) {
            case 0: perm = sample_shifted_stream(wv, rng); break;
            case 1: perm = sample_shifted_insertion(wv, rng); break;
            case 2: perm = sample_biased(wv, rng); break;
            default: perm = sample_biased_rejection(wv, rng); break;
        }
        ranks[t] = static_cast<std::uint32_t>(detail::permutation_rank(perm));
    });

    auto counts_of = [&](std::size_t block) {
        std::vector<double> counts(factorial, 0.0);
        for (std::size_t t = block * trials; t < (block + 1) * trials; ++t)
            counts[ranks[t]] += 1.0;
        return counts;
    };

    const auto shifted = chi_square_two_sample(counts_of(0), counts_of(1));
    const auto biased = chi_square_two_sample(counts_of(2), counts_of(3));

    TestResult res;
    res.name = "sampler_equivalence";
    res.statistic = std::min(shifted.p_value, biased.p_value);
    res.p_value = res.statistic;
    res.passed = shifted.p_value >= kAlpha && biased.p_value >= kAlpha;
    std::ostringstream details;
    details << "n=" << n << " trials=" << trials << "; shifted stream-vs-insertion p="
            << shifted.p_value << ", biased race-vs-rejection p=" << biased.p_value;
    res.details = details.str();
    return res;
}

}  // namespace invstat
