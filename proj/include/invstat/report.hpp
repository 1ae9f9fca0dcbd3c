#pragma once

// Declarative experiment configs and report emission.
//
// Config format: `key = value` lines, `#` comments, one `[check TYPE]`
// section per check.  Global keys: seed, threads.  Check types:
//
//   [check dominance]     q, n, mode=exact|mc, trials (mc only)
//   [check independence]  model, n, trials, source=shifted|biased,
//                         expect=pass|reject
//   [check equivalence]   model, n, trials
//   [check weak_law]      construction, model, regime=fixed|power|linear|
//                         superlinear, q|c|alpha, n_grid, trials, rtol,
//                         mode=annealed|conditional
//   [check mean]          construction, model, n, trials,
//                         expect=<real> (optional), max_sigma
//
// JSON report: one entry per check with {name, type, params, statistic,
// p_value, passed, seed, runtime_ms}.  CSV: plot-ready scaling rows.
// Everything except runtime_ms is a pure function of (config, seed).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments.hpp"

namespace invstat {

using json = nlohmann::ordered_json;

// round-trip-safe decimal formatting, '.' separator, 17 significant digits
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct CheckSpec {
    std::string type;
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    const std::string& get(const std::string& key) const {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::invalid_argument("check '" + type + "' missing parameter '" + key + "'");
        return it->second;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double real(const std::string& key) const {
        std::size_t pos = 0;
        const std::string& s = get(key);
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("check '" + type + "': bad number for '" + key + "'");
        }
        if (pos != s.size())
            throw std::invalid_argument("check '" + type + "': bad number for '" + key + "'");
        return v;
    }

    double real_or(const std::string& key, double fallback) const {
        return has(key) ? real(key) : fallback;
    }

    std::size_t integer(const std::string& key) const {
        const double v = real(key);
        if (v < 0 || v != std::floor(v))
            throw std::invalid_argument("check '" + type + "': '" + key +
                                        "' must be a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

    std::size_t integer_or(const std::string& key, std::size_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::vector<std::size_t> integer_list(const std::string& key) const {
        std::vector<std::size_t> out;
        std::stringstream ss(get(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t pos = 0;
            const long long v = std::stoll(item, &pos);
            if (pos != item.size() || v <= 0)
                throw std::invalid_argument("check '" + type + "': bad list entry '" + item + "'");
            out.push_back(static_cast<std::size_t>(v));
        }
        if (out.empty()) throw std::invalid_argument("check '" + type + "': empty list " + key);
        return out;
    }
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = all cores
    std::vector<CheckSpec> checks;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline Construction parse_construction(const std::string& s) {
    if (s == "biased") return Construction::Biased;
    if (s == "shifted") return Construction::Shifted;
    throw std::invalid_argument("construction must be 'biased' or 'shifted': " + s);
}

inline RegimeKind parse_regime_kind(const std::string& s) {
    if (s == "fixed") return RegimeKind::FixedQ;
    if (s == "power") return RegimeKind::Power;
    if (s == "linear") return RegimeKind::Linear;
    if (s == "superlinear") return RegimeKind::Superlinear;
    throw std::invalid_argument("unknown regime: " + s);
}

// Regime from check parameters.  "geo" without arguments is allowed when
// the regime supplies q; otherwise the model string carries it.
inline RegimeSpec parse_regime_spec(const CheckSpec& c) {
    RegimeSpec spec;
    spec.construction = parse_construction(c.get("construction"));
    spec.regime = parse_regime_kind(c.get_or("regime", "fixed"));
    const std::string model = c.get("model");
    if (model == "geo" || model.rfind("geo:", 0) == 0 || model.rfind("geometric", 0) == 0) {
        spec.weight_kind = WeightKind::Geometric;
        if (spec.regime == RegimeKind::FixedQ) {
            const WeightModel wm = parse_weight_model(model);
            if (wm.kind != WeightKind::Geometric)
                throw std::invalid_argument("expected geometric model");
            spec.q = wm.q;
        } else {
            spec.c = c.real_or("c", 1.0);
            spec.alpha = c.real_or("alpha", 0.5);
        }
    } else {
        const WeightModel wm = parse_weight_model(model);
        spec.weight_kind = wm.kind;
        spec.theta = wm.theta;
        spec.explicit_values = wm.values;
    }
    spec.validate();
    return spec;
}

// Weight vector for checks that operate on one realization.
inline WeightVector check_weight_vector(const CheckSpec& c, std::size_t n,
                                        std::uint64_t seed, std::uint64_t realization_slot) {
    const WeightModel wm = parse_weight_model(c.get("model"));
    Rng rng(seed, kRealizationStreamBase + realization_slot);
    return realize(wm, wm.kind == WeightKind::Explicit ? wm.values.size() : n, rng);
}

}  // namespace detail

inline void validate_experiment_config(const ExperimentConfig& cfg);

// Parse and fully validate a config; bad parameters are rejected here,
// before anything runs.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    CheckSpec* current = nullptr;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section");
            std::stringstream ss(line.substr(1, line.size() - 2));
            std::string word, type;
            ss >> word >> type;
            if (word != "check" || type.empty())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected [check TYPE]");
            cfg.checks.push_back(CheckSpec{type, {}});
            current = &cfg.checks.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        if (current == nullptr) {
            if (key == "seed") {
                cfg.seed = std::stoull(value);
            } else if (key == "threads") {
                cfg.threads = static_cast<unsigned>(std::stoul(value));
            } else {
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unknown global key '" + key + "'");
            }
        } else {
            current->kv[key] = value;
        }
    }
    validate_experiment_config(cfg);
    return cfg;
}

// Dry-run validation of every check (models parsed, regimes constructed).
inline void validate_experiment_config(const ExperimentConfig& cfg) {
    for (const auto& c : cfg.checks) {
        if (c.type == "dominance") {
            const double q = c.real("q");
            if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("dominance: need 0 < q < 1");
            const std::size_t n = c.integer("n");
            const std::string mode = c.get_or("mode", "exact");
            if (mode != "exact" && mode != "mc")
                throw std::invalid_argument("dominance: mode must be exact or mc");
            if (mode == "exact" && (n < 2 || n > kMaxEnumerationN))
                throw std::invalid_argument("dominance: exact mode needs 2 <= n <= 8");
            if (mode == "mc") c.integer("trials");
        } else if (c.type == "independence") {
            parse_weight_model(c.get("model"));
            if (c.integer("n") < 3) throw std::invalid_argument("independence: n >= 3");
            c.integer("trials");
            const std::string source = c.get_or("source", "shifted");
            if (source != "shifted" && source != "biased")
                throw std::invalid_argument("independence: source must be shifted or biased");
            const std::string expect = c.get_or("expect", "pass");
            if (expect != "pass" && expect != "reject")
                throw std::invalid_argument("independence: expect must be pass or reject");
        } else if (c.type == "equivalence") {
            parse_weight_model(c.get("model"));
            if (c.integer("n") > 5) throw std::invalid_argument("equivalence: n <= 5");
            c.integer("trials");
        } else if (c.type == "weak_law") {
            detail::parse_regime_spec(c);
            c.integer_list("n_grid");
            c.integer("trials");
            const std::string mode = c.get_or("mode", "annealed");
            if (mode != "annealed" && mode != "conditional")
                throw std::invalid_argument("weak_law: mode must be annealed or conditional");
        } else if (c.type == "mean") {
            detail::parse_regime_spec(c);
            c.integer("n");
            c.integer("trials");
        } else {
            throw std::invalid_argument("unknown check type: " + c.type);
        }
    }
}

struct ExperimentOutcome {
    json report;
    std::string csv;
    bool all_passed = true;
};

namespace detail {

inline void append_csv_row(std::string& csv, const std::string& model,
                           const std::string& regime, std::size_t n, std::size_t trials,
                           double mean, double stderr_mean, double predicted,
                           double scaled_mean, bool passed) {
    csv += model + "," + regime + "," + std::to_string(n) + "," + std::to_string(trials) + "," +
           format_real(mean) + "," + format_real(stderr_mean) + "," + format_real(predicted) +
           "," + format_real(scaled_mean) + "," + (passed ? "true" : "false") + "\n";
}

}  // namespace detail

inline ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    validate_experiment_config(cfg);
    ExperimentOutcome out;
    out.report = json::object();
    out.report["seed"] = cfg.seed;
    out.report["checks"] = json::array();
    out.csv = "model,regime,n,trials,mean,stderr,predicted,scaled_mean,passed\n";

    std::uint64_t realization_slot = 0;
    for (const auto& c : cfg.checks) {
        const auto t0 = std::chrono::steady_clock::now();
        TestResult result;
        json entry = json::object();
        entry["name"] = c.get_or("name", c.type);
        entry["type"] = c.type;
        json params = json::object();
        for (const auto& [k, v] : c.kv) params[k] = v;
        entry["params"] = params;

        if (c.type == "dominance") {
            const auto mode =
                c.get_or("mode", "exact") == "exact" ? DominanceMode::Exact : DominanceMode::MonteCarlo;
            result = dominance_check(c.real("q"), c.integer("n"), mode,
                                     c.integer_or("trials", 0), cfg.seed, cfg.threads);
        } else if (c.type == "independence") {
            const std::size_t n = c.integer("n");
            const WeightVector wv = detail::check_weight_vector(c, n, cfg.seed, realization_slot++);
            const auto source = c.get_or("source", "shifted") == "shifted"
                                    ? ProfileSource::ShiftedInsertion
                                    : ProfileSource::BiasedControl;
            result = independence_test(wv, n, c.integer("trials"), cfg.seed, cfg.threads, source);
            if (c.get_or("expect", "pass") == "reject") {
                result.passed = !result.passed;
                result.details += " [negative control: rejection expected]";
            }
        } else if (c.type == "equivalence") {
            const std::size_t n = c.integer("n");
            const WeightVector wv = detail::check_weight_vector(c, n, cfg.seed, realization_slot++);
            result = sampler_equivalence_test(wv, c.integer("trials"), cfg.seed, cfg.threads);
        } else if (c.type == "weak_law") {
            const RegimeSpec spec = detail::parse_regime_spec(c);
            const bool conditional = c.get_or("mode", "annealed") == "conditional";
            const WeakLawResult wl =
                weak_law_check(spec, c.integer_list("n_grid"), c.integer("trials"), cfg.seed,
                               c.real_or("rtol", 0.05), cfg.threads, conditional);
            result = wl.test;
            for (const auto& row : wl.rows)
                detail::append_csv_row(out.csv, spec.describe(),
                                       c.get_or("regime", "fixed"), row.n, c.integer("trials"),
                                       row.scaled_mean *
                                           std::pow(static_cast<double>(row.n), wl.scale_exponent),
                                       0.0, wl.predicted, row.scaled_mean, wl.test.passed);
        } else if (c.type == "mean") {
            const RegimeSpec spec = detail::parse_regime_spec(c);
            const std::size_t n = c.integer("n");
            const EstimatorReport rep =
                estimate_mean_inversions(spec, n, c.integer("trials"), cfg.seed, cfg.threads);
            result.name = "mean";
            result.statistic = rep.mean;
            if (c.has("expect")) {
                const double expect = c.real("expect");
                const double max_sigma = c.real_or("max_sigma", 4.0);
                const double z = std::abs(rep.mean - expect) / rep.stderr_mean;
                result.passed = z <= max_sigma;
                std::ostringstream d;
                d << spec.describe() << " n=" << n << ": mean " << rep.mean << " vs " << expect
                  << " (" << z << " sigma, allowed " << max_sigma << ")";
                result.details = d.str();
                detail::append_csv_row(out.csv, spec.describe(), c.get_or("regime", "fixed"), n,
                                       rep.trials, rep.mean, rep.stderr_mean, expect, rep.mean,
                                       result.passed);
            } else {
                result.passed = true;
                std::ostringstream d;
                d << spec.describe() << " n=" << n << ": mean " << rep.mean << " +- "
                  << rep.stderr_mean;
                result.details = d.str();
                detail::append_csv_row(out.csv, spec.describe(), c.get_or("regime", "fixed"), n,
                                       rep.trials, rep.mean, rep.stderr_mean,
                                       std::numeric_limits<double>::quiet_NaN(), rep.mean, true);
            }
        }

        const auto t1 = std::chrono::steady_clock::now();
        entry["statistic"] = result.statistic;
        if (result.p_value) {
            entry["p_value"] = *result.p_value;
        } else {
            entry["p_value"] = nullptr;
        }
        entry["passed"] = result.passed;
        entry["details"] = result.details;
        entry["seed"] = cfg.seed;
        entry["runtime_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        out.report["checks"].push_back(entry);
        out.all_passed = out.all_passed && result.passed;
    }
    out.report["all_passed"] = out.all_passed;
    return out;
}

// Canonical serialization with the timing scrubbed; two runs of the same
// (config, seed) must produce equal fingerprints regardless of threads.
inline std::string report_fingerprint(const json& report) {
    json copy = report;
    if (copy.contains("checks"))
        for (auto& entry : copy["checks"]) entry["runtime_ms"] = 0;
    return copy.dump(2);
}

inline void write_report_files(const ExperimentOutcome& out, const std::string& json_path,
                               const std::string& csv_path) {
    {
        std::ofstream f(json_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + json_path);
        f << out.report.dump(2) << "\n";
    }
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + csv_path);
        f << out.csv;
    }
}

}  // namespace invstat
