#pragma once

// Weight models and their realization as the first n weights.
//
// A WeightVector stores weights both in linear scale (with compensated
// prefix sums, used by the truncated-law samplers) and in log scale
// (used by the exponential-race sampler and pair probabilities, where
// linear weights can underflow long before the indices stop mattering).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "stats.hpp"

namespace invstat {

enum class WeightKind { Geometric, GEM, IIDProd, Uniform, Explicit };

struct WeightModel {
    WeightKind kind = WeightKind::Uniform;
    double q = 0.0;                 // Geometric
    double theta = 0.0;             // GEM, IIDProd
    std::vector<double> values;     // Explicit

    bool is_random() const { return kind == WeightKind::GEM || kind == WeightKind::IIDProd; }

    void validate() const {
        switch (kind) {
            case WeightKind::Geometric:
                if (!(q > 0.0 && q < 1.0))
                    throw std::invalid_argument("geometric model requires 0 < q < 1");
                break;
            case WeightKind::GEM:
            case WeightKind::IIDProd:
                if (!(theta > 0.0) || !std::isfinite(theta))
                    throw std::invalid_argument("theta must be positive");
                break;
            case WeightKind::Uniform:
                break;
            case WeightKind::Explicit:
                if (values.empty())
                    throw std::invalid_argument("explicit model requires at least one weight");
                for (double v : values)
                    if (!(v > 0.0) || !std::isfinite(v))
                        throw std::invalid_argument("explicit weights must be strictly positive");
                break;
        }
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case WeightKind::Geometric: os << "geo:q=" << q; break;
            case WeightKind::GEM: os << "gem:theta=" << theta; break;
            case WeightKind::IIDProd: os << "iidprod:theta=" << theta; break;
            case WeightKind::Uniform: os << "uniform"; break;
            case WeightKind::Explicit: os << "explicit[" << values.size() << "]"; break;
        }
        return os.str();
    }
};

// Realized (or deterministic) weights p_1..p_n, unnormalized.
struct WeightVector {
    std::vector<double> w;       // w[k] > 0 where representable
    std::vector<double> log_w;   // exact even where w underflows
    std::vector<double> prefix;  // prefix[k] = w[0] + ... + w[k], compensated

    // set when built from a geometric model; enables O(1) truncated draws
    std::optional<double> geometric_q;

    std::size_t size() const { return w.size(); }
    double total() const { return prefix.back(); }

    // prefix sum of the first j weights, j in [1, n]
    double prefix_sum(std::size_t j) const { return prefix[j - 1]; }

    static WeightVector from_log_weights(std::vector<double> logw) {
        WeightVector wv;
        wv.log_w = std::move(logw);
        wv.w.resize(wv.log_w.size());
        wv.prefix.resize(wv.log_w.size());
        KahanSum acc;
        for (std::size_t k = 0; k < wv.log_w.size(); ++k) {
            wv.w[k] = std::exp(wv.log_w[k]);
            acc.add(wv.w[k]);
            // binary search over prefix requires nondecreasing values even
            // at the underflow horizon
            wv.prefix[k] = k == 0 ? acc.value() : std::max(wv.prefix[k - 1], acc.value());
        }
        return wv;
    }

    static WeightVector from_linear_weights(const std::vector<double>& vals) {
        if (vals.empty()) throw std::invalid_argument("weight vector must be nonempty");
        WeightVector wv;
        wv.w = vals;
        wv.log_w.resize(vals.size());
        wv.prefix.resize(vals.size());
        KahanSum acc;
        for (std::size_t k = 0; k < vals.size(); ++k) {
            if (!(vals[k] > 0.0) || !std::isfinite(vals[k]))
                throw std::invalid_argument("weights must be strictly positive and finite");
            wv.log_w[k] = std::log(vals[k]);
            acc.add(vals[k]);
            wv.prefix[k] = k == 0 ? acc.value() : std::max(wv.prefix[k - 1], acc.value());
        }
        return wv;
    }
};

inline WeightVector geometric_weights(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("geometric_weights: need 0 < q < 1");
    if (n == 0) throw std::invalid_argument("geometric_weights: need n >= 1");
    const double log_q = std::log(q);
    const double log_1mq = std::log1p(-q);
    std::vector<double> logw(n);
    for (std::size_t k = 0; k < n; ++k)
        logw[k] = log_1mq + static_cast<double>(k) * log_q;
    WeightVector wv = WeightVector::from_log_weights(std::move(logw));
    wv.geometric_q = q;
    return wv;
}

inline WeightVector uniform_weights(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_weights: need n >= 1");
    return WeightVector::from_linear_weights(
        std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

inline WeightVector explicit_weights(const std::vector<double>& values) {
    return WeightVector::from_linear_weights(values);
}

// Stick-breaking realization with Beta(1,theta) sticks, first n sticks only.
// W = 1 - U^(1/theta) by inverse CDF, so log(1-W) = log(U)/theta exactly.
template <class RngT = Rng>
WeightVector realize_gem(double theta, std::size_t n, RngT& rng) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("realize_gem: theta must be positive");
    if (n == 0) throw std::invalid_argument("realize_gem: need n >= 1");
    std::vector<double> logw(n);
    double log_remaining = 0.0;  // log prod_{i<k} (1 - W_i)
    for (std::size_t k = 0; k < n; ++k) {
        const double log_u_over_theta = std::log(rng.uniform_pos()) / theta;
        const double stick = -std::expm1(log_u_over_theta);  // W_k in (0,1)
        logw[k] = log_remaining + std::log(stick);
        log_remaining += log_u_over_theta;
    }
    return WeightVector::from_log_weights(std::move(logw));
}

// Unnormalized product weights p'_k = prod_{i<=k} U_i^(1/theta).
// The global normalizer cancels from every probability restricted to [n],
// so it is never formed.
template <class RngT = Rng>
WeightVector realize_iid_prod(double theta, std::size_t n, RngT& rng) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw std::invalid_argument("realize_iid_prod: theta must be positive");
    if (n == 0) throw std::invalid_argument("realize_iid_prod: need n >= 1");
    std::vector<double> logw(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += std::log(rng.uniform_pos()) / theta;
        logw[k] = acc;
    }
    return WeightVector::from_log_weights(std::move(logw));
}

// Realize a model as its first n weights.  Deterministic models ignore rng.
template <class RngT = Rng>
WeightVector realize(const WeightModel& model, std::size_t n, RngT& rng) {
    model.validate();
    switch (model.kind) {
        case WeightKind::Geometric: return geometric_weights(model.q, n);
        case WeightKind::GEM: return realize_gem(model.theta, n, rng);
        case WeightKind::IIDProd: return realize_iid_prod(model.theta, n, rng);
        case WeightKind::Uniform: return uniform_weights(n);
        case WeightKind::Explicit:
            if (n != model.values.size())
                throw std::invalid_argument("explicit model: n must equal number of values");
            return explicit_weights(model.values);
    }
    throw std::logic_error("unreachable");
}

// Parse model strings: "geo:q=0.5", "gem:theta=2", "iidprod:theta=2",
// "uniform", "explicit:1,2,3".
inline WeightModel parse_weight_model(const std::string& text) {
    WeightModel m;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

    auto parse_named_real = [&](const std::string& name) {
        const std::string prefix = name + "=";
        if (args.rfind(prefix, 0) != 0)
            throw std::invalid_argument("weight model '" + head + "' expects " + prefix + "<value>");
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(args.substr(prefix.size()), &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad numeric value in weight model: " + text);
        }
        if (pos != args.size() - prefix.size())
            throw std::invalid_argument("trailing characters in weight model: " + text);
        return v;
    };

    if (head == "geo" || head == "geometric") {
        m.kind = WeightKind::Geometric;
        m.q = parse_named_real("q");
    } else if (head == "gem") {
        m.kind = WeightKind::GEM;
        m.theta = parse_named_real("theta");
    } else if (head == "iidprod") {
        m.kind = WeightKind::IIDProd;
        m.theta = parse_named_real("theta");
    } else if (head == "uniform") {
        m.kind = WeightKind::Uniform;
        if (!args.empty()) throw std::invalid_argument("uniform model takes no parameters");
    } else if (head == "explicit") {
        m.kind = WeightKind::Explicit;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) throw std::invalid_argument("empty weight in explicit model");
            std::size_t pos = 0;
            m.values.push_back(std::stod(item, &pos));
            if (pos != item.size())
                throw std::invalid_argument("bad weight in explicit model: " + item);
        }
        if (m.values.empty()) throw std::invalid_argument("explicit model requires weights");
    } else {
        throw std::invalid_argument("unknown weight model: " + text);
    }
    m.validate();
    return m;
}

}  // namespace invstat
