#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace spua {

// 1 - (1-p)^k without cancellation for small p*k (p as low as 0.01, k = 1).
inline double accept_any_topk_prob(double p, int k) {
    if (p >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(k) * std::log1p(-p));
}

struct QuadratureOptions {
    double abs_tol = 1e-11;
    int max_depth = 48;
};

namespace detail {

// QUADPACK dqk15 nodes and weights (7-point Gauss, 15-point Kronrod).
inline constexpr double kKronrodNodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552591, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472782};
inline constexpr double kGaussWeights[4] = {
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894,
    0.41795918367346938};

template <class F>
void gauss_kronrod_15(const F& f, double a, double b, double& value,
                      double& error, double& resabs) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kKronrodNodes[j]);
        fv[14 - j] = f(c + h * kKronrodNodes[j]);
    }
    fv[7] = f(c);
    double kron = 0.0, gauss = 0.0, abs_sum = 0.0;
    for (int j = 0; j < 8; ++j) {
        double pair = (j == 7) ? fv[7] : fv[j] + fv[14 - j];
        double abs_pair =
            (j == 7) ? std::abs(fv[7]) : std::abs(fv[j]) + std::abs(fv[14 - j]);
        kron += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * abs_pair;
        if (j % 2 == 1 && j < 7) gauss += kGaussWeights[j / 2] * pair;
    }
    gauss += kGaussWeights[3] * fv[7];
    value = kron * h;
    error = std::abs((kron - gauss) * h);
    resabs = abs_sum * std::abs(h);
}

template <class F>
void integrate_adaptive(const F& f, double a, double b, double tol, int depth,
                        const QuadratureOptions& opts, double& total,
                        double& err_total) {
    double v, e, resabs;
    gauss_kronrod_15(f, a, b, v, e, resabs);
    // The second test is the attainable round-off floor: below it further
    // bisection cannot reduce the estimate and would recurse on a full tree.
    if (e <= tol || e <= 50.0 * 1e-16 * resabs || depth >= opts.max_depth) {
        total += v;
        err_total += e;
        return;
    }
    double m = 0.5 * (a + b);
    integrate_adaptive(f, a, m, 0.5 * tol, depth + 1, opts, total, err_total);
    integrate_adaptive(f, m, b, 0.5 * tol, depth + 1, opts, total, err_total);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute tolerance.
// Throws if the error estimate cannot be brought under 100x the tolerance.
template <class F>
double integrate(F&& f, double a, double b,
                 const QuadratureOptions& opts = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate: bad interval");
    if (a == b) return 0.0;
    double total = 0.0, err = 0.0;
    detail::integrate_adaptive(f, a, b, opts.abs_tol, 0, opts, total, err);
    if (err > 100.0 * opts.abs_tol)
        throw std::runtime_error("integrate: tolerance not attained");
    return total;
}

struct RootOptions {
    double x_tol = 1e-14;
    double f_tol = 1e-12;
    int max_iterations = 200;
};

// Bracketed root of a continuous function: bisection safeguarded with secant
// steps.  The bracket [lo, hi] must straddle a sign change.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opts = {});

// Gauss quantile helper for test statistics (Acklam-style rational fit would
// be overkill; Wilson-Hilferty is enough for chi-square thresholds).
double chi_square_quantile(int dof, double prob);

}  // namespace spua
