#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature with interval bisection.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace invstat {

namespace detail {

// K15 abscissae on [0,1] (symmetric) and weights; G7 weights on the
// shared Gauss nodes (odd Kronrod indices).
inline constexpr double kKronrodX[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGaussW[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
void gauss_kronrod_15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kKronrodX[i];
        const double fsum = f(c - dx) + f(c + dx);
        resk += kKronrodW[i] * fsum;
        if (i % 2 == 1) resg += kGaussW[i / 2] * fsum;
    }
    const double fc = f(c);
    resk += kKronrodW[7] * fc;
    resg += kGaussW[3] * fc;
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

}  // namespace detail

// Integrate f over [a,b] to absolute tolerance tol.  Recursive bisection
// with per-interval error budget proportional to length.
template <class F>
double integrate(const F& f, double a, double b, double tol, int max_depth = 60) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (a == b) return 0.0;

    struct Rec {
        static double go(const F& f, double a, double b, double tol, int depth) {
            double result = 0.0, err = 0.0;
            detail::gauss_kronrod_15(f, a, b, result, err);
            if (err <= tol || depth <= 0) return result;
            const double mid = 0.5 * (a + b);
            return go(f, a, mid, 0.5 * tol, depth - 1) +
                   go(f, mid, b, 0.5 * tol, depth - 1);
        }
    };
    return Rec::go(f, a, b, tol, max_depth);
}

}  // namespace invstat
