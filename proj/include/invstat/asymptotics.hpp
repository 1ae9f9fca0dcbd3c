#pragma once

// Limiting constants and scaling laws for the inversion statistic under
// the geometric, GEM, and IID-product weight families.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "exact.hpp"
#include "quadrature.hpp"
#include "weights.hpp"

namespace invstat {

// lim E[I_n]/n under the biased law with fixed q: sum_{k>=1} 1/(1+q^-k).
// Partial sum with the integral tail bound
//   sum_{k>K} q^k/(1+q^k) <= int_K^inf dx/(1+q^-x) = log(1+q^K)/(-log q).
inline SeriesValue biased_fixed_q_limit(double q, double tol = 1e-12) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    const double log_q = std::log(q);
    SeriesValue out;
    KahanSum s;
    double qk = 1.0;
    std::size_t k = 0;
    for (;;) {
        ++k;
        qk = std::exp(static_cast<double>(k) * log_q);
        s.add(qk / (1.0 + qk));
        const double tail = std::log1p(qk) / (-log_q);
        if (tail <= tol || k > 50'000'000) {
            out.truncation_error_bound = tail;
            break;
        }
    }
    out.value = s.value();
    out.terms_used = k;
    return out;
}

// lim E[I_n]/n under the shifted law with fixed q.
inline double shifted_fixed_q_limit(double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
    return q / (1.0 - q);
}

// I_b(c) = (1/c^2) int_0^{1-e^-c} log(1-x/2)/(x-1) dx.
// The substitution x = 1-e^-t turns the near-singular endpoint into the
// smooth integrand log(2/(1+e^-t)) on [0,c]; used for large c, while the
// moderate range is evaluated on the original integrand as a cross-check
// of the same value.
inline double integral_Ib(double c, double tol = 1e-10) {
    if (!(c > 0.0)) throw std::invalid_argument("integral_Ib: c > 0 required");
    if (c <= 30.0) {
        const double upper = -std::expm1(-c);
        const double val = integrate(
            [](double x) { return std::log1p(-0.5 * x) / (x - 1.0); }, 0.0, upper, tol);
        return val / (c * c);
    }
    const double val = integrate(
        [](double t) { return std::log(2.0 / (1.0 + std::exp(-t))); }, 0.0, c, tol);
    return val / (c * c);
}

namespace detail {

// Integrand of I_s: 1/(1-x) + log(1-x)/x, with the removable 0/0 at the
// origin replaced by its expansion sum_{j>=1} j/(j+1) x^j.
inline double is_integrand(double x) {
    if (x < 1e-4) return x * (0.5 + x * (2.0 / 3.0 + x * 0.75));
    return 1.0 / (1.0 - x) + std::log1p(-x) / x;
}

}  // namespace detail

// I_s(c) = (1/c^2) int_0^{1-e^-c} (1/(1-x) + log(1-x)/x) dx.
// Same endpoint substitution for large c: integrand 1 - t e^-t/(1-e^-t).
inline double integral_Is(double c, double tol = 1e-10) {
    if (!(c > 0.0)) throw std::invalid_argument("integral_Is: c > 0 required");
    if (c <= 30.0) {
        const double upper = -std::expm1(-c);
        const double val = integrate(detail::is_integrand, 0.0, upper, tol);
        return val / (c * c);
    }
    const double val = integrate(
        [](double t) {
            if (t < 1e-8) return 0.5 * t;
            return 1.0 - t * std::exp(-t) / (-std::expm1(-t));
        },
        0.0, c, tol);
    return val / (c * c);
}

// Dilogarithm-form cross-check:
// I_s(c) = 1/c + (1/c^2) int_0^{1-e^-c} log(1-x)/x dx.
// The integrand here is bounded (it runs from -1 down to about -c), so
// this is an independent quadrature route to the same constant.
inline double integral_Is_dilog_form(double c, double tol = 1e-10) {
    if (!(c > 0.0)) throw std::invalid_argument("integral_Is_dilog_form: c > 0 required");
    const double upper = -std::expm1(-c);
    const double val = integrate(
        [](double x) {
            if (x < 1e-8) return -1.0 - 0.5 * x;
            return std::log1p(-x) / x;
        },
        0.0, upper, tol);
    return 1.0 / c + val / (c * c);
}

// ------------------------------------------------------------------
// Regime specification and predicted scaling
// ------------------------------------------------------------------

enum class Construction { Biased, Shifted };

enum class RegimeKind {
    FixedQ,       // q_n = q (geometric) or fixed-theta random models
    Power,        // q_n = 1 - c/n^alpha, alpha in (0,1)
    Linear,       // q_n = 1 - c/n
    Superlinear,  // q_n = 1 - 1/n^2 (representative of q_n = 1 - o(1/n))
};

struct RegimeSpec {
    Construction construction = Construction::Shifted;
    WeightKind weight_kind = WeightKind::Geometric;
    RegimeKind regime = RegimeKind::FixedQ;
    double q = 0.5;      // FixedQ + Geometric
    double c = 1.0;      // Power / Linear
    double alpha = 0.5;  // Power
    double theta = 1.0;  // GEM / IIDProd
    std::vector<double> explicit_values;  // Explicit

    void validate() const {
        if (weight_kind != WeightKind::Geometric && regime != RegimeKind::FixedQ)
            throw std::invalid_argument("only geometric models admit varying regimes");
        if (weight_kind == WeightKind::Geometric) {
            switch (regime) {
                case RegimeKind::FixedQ:
                    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("need 0 < q < 1");
                    break;
                case RegimeKind::Power:
                    if (!(c > 0.0)) throw std::invalid_argument("need c > 0");
                    if (!(alpha > 0.0 && alpha < 1.0))
                        throw std::invalid_argument("need alpha in (0,1)");
                    break;
                case RegimeKind::Linear:
                    if (!(c > 0.0)) throw std::invalid_argument("need c > 0");
                    break;
                case RegimeKind::Superlinear:
                    break;
            }
        } else if (weight_kind == WeightKind::GEM || weight_kind == WeightKind::IIDProd) {
            if (!(theta > 0.0)) throw std::invalid_argument("need theta > 0");
        } else if (weight_kind == WeightKind::Explicit) {
            if (explicit_values.empty())
                throw std::invalid_argument("explicit model requires weights");
        }
    }

    // effective geometric parameter at size n (Geometric only)
    double q_at(std::size_t n) const {
        const double nd = static_cast<double>(n);
        switch (regime) {
            case RegimeKind::FixedQ: return q;
            case RegimeKind::Power: return 1.0 - c / std::pow(nd, alpha);
            case RegimeKind::Linear: return 1.0 - c / nd;
            case RegimeKind::Superlinear: return 1.0 - 1.0 / (nd * nd);
        }
        throw std::logic_error("unreachable");
    }

    WeightModel weight_model_at(std::size_t n) const {
        WeightModel m;
        switch (weight_kind) {
            case WeightKind::Geometric:
                m.kind = WeightKind::Geometric;
                m.q = q_at(n);
                if (!(m.q > 0.0 && m.q < 1.0))
                    throw std::invalid_argument("regime yields q outside (0,1) at this n");
                break;
            case WeightKind::GEM:
                m.kind = WeightKind::GEM;
                m.theta = theta;
                break;
            case WeightKind::IIDProd:
                m.kind = WeightKind::IIDProd;
                m.theta = theta;
                break;
            case WeightKind::Uniform:
                m.kind = WeightKind::Uniform;
                break;
            case WeightKind::Explicit:
                m.kind = WeightKind::Explicit;
                m.values = explicit_values;
                break;
        }
        return m;
    }

    std::string describe() const {
        std::ostringstream os;
        os << (construction == Construction::Biased ? "biased" : "shifted");
        switch (weight_kind) {
            case WeightKind::Geometric:
                os << " geo";
                switch (regime) {
                    case RegimeKind::FixedQ: os << " fixed q=" << q; break;
                    case RegimeKind::Power: os << " power c=" << c << " alpha=" << alpha; break;
                    case RegimeKind::Linear: os << " linear c=" << c; break;
                    case RegimeKind::Superlinear: os << " superlinear"; break;
                }
                break;
            case WeightKind::GEM: os << " gem theta=" << theta; break;
            case WeightKind::IIDProd: os << " iidprod theta=" << theta; break;
            case WeightKind::Uniform: os << " uniform"; break;
            case WeightKind::Explicit: os << " explicit[" << explicit_values.size() << "]"; break;
        }
        return os.str();
    }
};

struct ScalingPrediction {
    double scale_exponent = 1.0;  // E[I_n] ~ constant * n^scale_exponent
    double constant = 0.0;
};

// The predicted (exponent, constant) pair for E[I_n]/n^exponent.
inline ScalingPrediction predicted_scaled_expectation(const RegimeSpec& spec,
                                                      double quad_tol = 1e-10) {
    spec.validate();
    const bool biased = spec.construction == Construction::Biased;
    switch (spec.weight_kind) {
        case WeightKind::GEM:
            return {1.0, spec.theta};
        case WeightKind::IIDProd:
            if (!biased)
                throw std::invalid_argument("no shifted limit is stated for iid-product weights");
            return {1.0, spec.theta * std::log(2.0)};
        case WeightKind::Uniform:
        case WeightKind::Explicit:
            throw std::invalid_argument("no asymptotic prediction for uniform/explicit weights");
        default:
            break;
    }
    switch (spec.regime) {
        case RegimeKind::FixedQ:
            return biased ? ScalingPrediction{1.0, biased_fixed_q_limit(spec.q).value}
                          : ScalingPrediction{1.0, shifted_fixed_q_limit(spec.q)};
        case RegimeKind::Power:
            return {1.0 + spec.alpha, (biased ? std::log(2.0) : 1.0) / spec.c};
        case RegimeKind::Linear:
            return {2.0, biased ? integral_Ib(spec.c, quad_tol) : integral_Is(spec.c, quad_tol)};
        case RegimeKind::Superlinear:
            return {2.0, 0.25};
    }
    throw std::logic_error("unreachable");
}

}  // namespace invstat
