// Command-line front end: sampling, exact evaluation, asymptotic
// constants, verification suites, and experiment reports.
//
// Exit codes: 0 success, 1 check failure, 2 usage error.
// Every run prints its effective seed on stderr; stdout is reserved for
// the requested output and is byte-identical for identical (argv, seed).

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include <invstat/asymptotics.hpp>
#include <invstat/exact.hpp>
#include <invstat/experiments.hpp>
#include <invstat/report.hpp>
#include <invstat/samplers.hpp>
#include <invstat/verify.hpp>
#include <invstat/weights.hpp>

namespace {

using namespace invstat;

std::uint64_t resolve_seed(std::uint64_t requested) {
    if (requested != 0) return requested;
    std::random_device rd;
    std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    if (seed == 0) seed = 1;
    return seed;
}

unsigned default_threads() {
    if (const char* env = std::getenv("INVSTAT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // all cores
}

void print_real(const std::string& label, double value) {
    std::cout << label << " " << format_real(value) << "\n";
}

void print_series(const std::string& label, const SeriesValue& s) {
    std::cout << label << " " << format_real(s.value) << " +- "
              << format_real(s.truncation_error_bound) << " (terms " << s.terms_used << ")\n";
}

int run_sample(const std::string& model_text, const std::string& construction, std::size_t n,
               std::size_t count, std::uint64_t seed, const std::string& emit, unsigned threads) {
    (void)threads;
    const WeightModel model = parse_weight_model(model_text);
    const bool biased = construction == "biased";
    if (!biased && construction != "shifted")
        throw CLI::ValidationError("--construction must be biased or shifted");
    if (model.kind == WeightKind::Explicit) n = model.values.size();
    if (n == 0) throw CLI::ValidationError("--n must be positive");

    WeightVector shared;
    const bool fixed = !model.is_random();
    if (fixed) {
        Rng rng(seed, kRealizationStreamBase);
        shared = realize(model, n, rng);
    }
    if (emit == "inversions") std::cout << "trial,inversions\n";
    for (std::size_t t = 0; t < count; ++t) {
        Rng rng(seed, t);
        WeightVector local;
        const WeightVector* use = &shared;
        if (!fixed) {
            local = realize(model, n, rng);
            use = &local;
        }
        if (emit == "perms") {
            const Permutation perm =
                biased ? sample_biased(*use, rng) : sample_shifted_insertion(*use, rng);
            for (std::size_t i = 0; i < perm.size(); ++i)
                std::cout << perm.seq[i] << (i + 1 == perm.size() ? "" : " ");
            std::cout << "\n";
        } else if (emit == "inversions") {
            const std::uint64_t total = biased
                                            ? count_inversions(sample_biased(*use, rng))
                                            : sample_inversion_total_shifted(*use, rng);
            std::cout << t << "," << total << "\n";
        } else {
            throw CLI::ValidationError("--emit must be perms or inversions");
        }
    }
    return 0;
}

int print_criteria(const std::vector<CriterionResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.index << ": " << r.title
                  << "\n";
        for (const auto& line : r.lines) std::cout << "    " << line << "\n";
        all = all && r.passed;
    }
    std::cout << (all ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"inversion statistics for weight-biased and weight-shifted random permutations"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    unsigned threads = default_threads();
    app.add_option("--seed", seed, "master seed (0 = draw from entropy and print)");
    app.add_option("--threads", threads, "worker threads (0 = all cores; never affects results)");

    // ---- sample ----
    auto* sample = app.add_subcommand("sample", "emit permutations or inversion totals");
    std::string model_text = "geo:q=0.5";
    std::string construction = "shifted";
    std::size_t n = 10, count = 1;
    std::string emit = "perms";
    sample->add_option("--model", model_text, "geo:q=Q | gem:theta=T | iidprod:theta=T | uniform | explicit:a,b,...")->required();
    sample->add_option("--construction", construction, "biased | shifted")->required();
    sample->add_option("--n", n, "permutation size");
    sample->add_option("--count", count, "number of samples");
    sample->add_option("--emit", emit, "perms | inversions");

    // ---- exact ----
    auto* exact_cmd = app.add_subcommand("exact", "closed forms, series, enumeration oracles");
    std::string formula;
    double q = 0.5, theta = 1.0, tol = 1e-8;
    std::size_t en = 3, m = 1, k = 1, kmax = 60, mmax = 400, jj = 2, ii = 1, terms = 2000000;
    std::string form = "exact";
    exact_cmd->add_option("formula", formula,
                          "biased-geo-mean | shifted-geo-mean | shifted-general-mean | "
                          "truncated-geo-pmf | pair-prob | mallows-mean | binom-identity | "
                          "identity-total | gem-biased-pair | gem-biased-total | "
                          "gem-shifted-term | gem-shifted-total | iidprod-pair | iidprod-total")
        ->required();
    exact_cmd->add_option("--q", q, "geometric parameter in (0,1)");
    exact_cmd->add_option("--n", en, "size");
    exact_cmd->add_option("--theta", theta, "positive shape parameter");
    exact_cmd->add_option("--m", m, "identity order");
    exact_cmd->add_option("--k", k, "pair distance");
    exact_cmd->add_option("--kmax", kmax, "series terms over k");
    exact_cmd->add_option("--mmax", mmax, "series terms over m");
    exact_cmd->add_option("--terms", terms, "partial-sum length");
    exact_cmd->add_option("--tol", tol, "series tolerance");
    exact_cmd->add_option("--i", ii, "first value of the pair");
    exact_cmd->add_option("--j", jj, "second value of the pair / truncation point");
    exact_cmd->add_option("--model", model_text, "weight model for general-weight formulas");
    exact_cmd->add_option("--form", form, "shifted-geo-mean: exact | compact");

    // ---- asym ----
    auto* asym = app.add_subcommand("asym", "asymptotic constants and predictions");
    std::string constant;
    double c = 1.0;
    double alpha_param = 0.5;
    std::string regime = "fixed";
    asym->add_option("constant", constant,
                     "Ib | Is | Is-dilog | biased-fixed-q | shifted-fixed-q | predict")
        ->required();
    asym->add_option("--c", c, "regime constant c > 0");
    asym->add_option("--q", q, "geometric parameter");
    asym->add_option("--tol", tol, "quadrature/series tolerance");
    asym->add_option("--construction", construction, "biased | shifted (predict)");
    asym->add_option("--model", model_text, "geo | gem:theta=T | iidprod:theta=T (predict)");
    asym->add_option("--regime", regime, "fixed | power | linear | superlinear (predict)");
    asym->add_option("--alpha", alpha_param, "power-regime exponent in (0,1)");

    // ---- verify ----
    auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
    std::string suite = "all";
    double vq = 0.0;
    std::size_t vn = 0;
    verify_cmd->add_option("suite", suite,
                           "all | oracle | dominance | independence | identity | series | "
                           "quadrature | scaling | random-weights | structure | repro");
    verify_cmd->add_option("--q", vq, "dominance: single q");
    verify_cmd->add_option("--n", vn, "dominance: single n");

    // ---- report ----
    auto* report_cmd = app.add_subcommand("report", "run an experiment config, write reports");
    std::string config_path, out_dir = ".";
    report_cmd->add_option("--config", config_path, "experiment config file")->required();
    report_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const bool seed_explicit = seed != 0;
        if (!report_cmd->parsed()) {
            seed = resolve_seed(seed);
            std::cerr << "# seed " << seed << "\n";
        }

        if (sample->parsed()) return run_sample(model_text, construction, n, count, seed, emit, threads);

        if (exact_cmd->parsed()) {
            if (formula == "biased-geo-mean") {
                print_real("biased-geo-mean", biased_geo_expected_inversions(q, en));
            } else if (formula == "shifted-geo-mean") {
                if (form == "compact")
                    print_real("shifted-geo-mean(compact)",
                               shifted_geo_expected_inversions_compact(q, en));
                else
                    print_real("shifted-geo-mean", shifted_geo_expected_inversions(q, en));
            } else if (formula == "shifted-general-mean") {
                const WeightModel wm = parse_weight_model(model_text);
                Rng rng(seed, kRealizationStreamBase);
                const WeightVector wv =
                    realize(wm, wm.kind == WeightKind::Explicit ? wm.values.size() : en, rng);
                print_real("shifted-general-mean", shifted_expected_inversions_general(wv));
            } else if (formula == "truncated-geo-pmf") {
                const auto pmf = truncated_geometric_pmf(q, jj);
                for (std::size_t l = 0; l < pmf.probs.size(); ++l)
                    std::cout << l << " " << format_real(pmf.probs[l]) << "\n";
            } else if (formula == "pair-prob") {
                const WeightModel wm = parse_weight_model(model_text);
                Rng rng(seed, kRealizationStreamBase);
                const WeightVector wv =
                    realize(wm, wm.kind == WeightKind::Explicit ? wm.values.size() : en, rng);
                print_real("biased-pair-prob", biased_pair_inversion_prob(wv, ii, jj));
            } else if (formula == "mallows-mean") {
                print_real("mallows-mean", expected_inversions(mallows_enumerate(q, en)));
            } else if (formula == "binom-identity") {
                const auto v = binom_ratio_identity(theta, m);
                std::cout << "lhs " << format_real(v.lhs) << "\nrhs " << format_real(v.rhs)
                          << "\n";
                if (v.cancellation_flagged) std::cout << "warning: cancellation flagged\n";
            } else if (formula == "identity-total") {
                print_real("identity-total", identity_total_partial(theta, terms));
            } else if (formula == "gem-biased-pair") {
                print_series("gem-biased-pair", gem_biased_pair_term(theta, k, mmax));
            } else if (formula == "gem-biased-total") {
                print_series("gem-biased-total", gem_biased_total(theta, kmax, mmax));
            } else if (formula == "gem-shifted-term") {
                print_real("gem-shifted-term", gem_shifted_term(theta, k));
            } else if (formula == "gem-shifted-total") {
                print_series("gem-shifted-total", gem_shifted_total(theta, kmax));
            } else if (formula == "iidprod-pair") {
                print_series("iidprod-pair", iid_prod_pair_term(theta, k, tol));
            } else if (formula == "iidprod-total") {
                print_series("iidprod-total", iid_prod_total(theta, tol));
            } else {
                throw CLI::ValidationError("unknown formula: " + formula);
            }
            return 0;
        }

        if (asym->parsed()) {
            if (constant == "Ib") {
                print_real("Ib", integral_Ib(c, tol));
            } else if (constant == "Is") {
                print_real("Is", integral_Is(c, tol));
            } else if (constant == "Is-dilog") {
                print_real("Is-dilog", integral_Is_dilog_form(c, tol));
            } else if (constant == "biased-fixed-q") {
                print_series("biased-fixed-q", biased_fixed_q_limit(q, tol));
            } else if (constant == "shifted-fixed-q") {
                print_real("shifted-fixed-q", shifted_fixed_q_limit(q));
            } else if (constant == "predict") {
                RegimeSpec spec;
                spec.construction = construction == "biased" ? Construction::Biased
                                                             : Construction::Shifted;
                if (model_text == "geo" || model_text.rfind("geo:", 0) == 0) {
                    spec.weight_kind = WeightKind::Geometric;
                    if (model_text != "geo") spec.q = parse_weight_model(model_text).q;
                } else {
                    const WeightModel wm = parse_weight_model(model_text);
                    spec.weight_kind = wm.kind;
                    spec.theta = wm.theta;
                }
                if (regime == "fixed") spec.regime = RegimeKind::FixedQ;
                else if (regime == "power") spec.regime = RegimeKind::Power;
                else if (regime == "linear") spec.regime = RegimeKind::Linear;
                else if (regime == "superlinear") spec.regime = RegimeKind::Superlinear;
                else throw CLI::ValidationError("unknown regime: " + regime);
                spec.c = c;
                spec.alpha = alpha_param;
                const ScalingPrediction p = predicted_scaled_expectation(spec);
                std::cout << "exponent " << format_real(p.scale_exponent) << "\nconstant "
                          << format_real(p.constant) << "\n";
            } else {
                throw CLI::ValidationError("unknown constant: " + constant);
            }
            return 0;
        }

        if (verify_cmd->parsed()) {
            using namespace invstat::verify;
            if (suite == "dominance" && vq > 0.0 && vn > 0) {
                const TestResult t = dominance_check(vq, vn, DominanceMode::Exact);
                std::cout << (t.passed ? "PASS" : "FAIL") << " dominance: " << t.details << "\n";
                return t.passed ? 0 : 1;
            }
            std::vector<CriterionResult> results;
            if (suite == "all") results = run_all(threads);
            else if (suite == "oracle") results.push_back(oracle_equivalence());
            else if (suite == "dominance") results.push_back(dominance());
            else if (suite == "independence") results.push_back(independence(threads));
            else if (suite == "identity") results.push_back(identity());
            else if (suite == "series") results.push_back(series_totals());
            else if (suite == "quadrature") results.push_back(quadrature_constants());
            else if (suite == "scaling") results.push_back(regime_scaling(threads));
            else if (suite == "random-weights") results.push_back(random_weight_limits(threads));
            else if (suite == "structure") results.push_back(structural(threads));
            else if (suite == "repro") results.push_back(reproducibility());
            else throw CLI::ValidationError("unknown suite: " + suite);
            return print_criteria(results);
        }

        if (report_cmd->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw CLI::ValidationError("cannot open config: " + config_path);
            ExperimentConfig cfg = parse_experiment_config(in);
            if (seed_explicit) cfg.seed = seed;
            if (threads != 0) cfg.threads = threads;
            std::cerr << "# seed " << cfg.seed << "\n";
            const ExperimentOutcome outcome = run_experiment(cfg);
            write_report_files(outcome, out_dir + "/report.json", out_dir + "/tables.csv");
            for (const auto& entry : outcome.report["checks"])
                std::cout << (entry["passed"].get<bool>() ? "PASS " : "FAIL ")
                          << entry["name"].get<std::string>() << ": "
                          << entry["details"].get<std::string>() << "\n";
            std::cout << (outcome.all_passed ? "ALL CHECKS PASSED" : "CHECKS FAILED") << "\n";
            return outcome.all_passed ? 0 : 1;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
