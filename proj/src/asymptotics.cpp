#include "spua/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spua/numerics.hpp"

namespace spua {

double beta_integral(double beta) {
    return integrate(
        [beta](double y) {
            return 1.0 / (y * (1.0 - std::log(y)) + beta - 1.0);
        },
        0.0, 1.0, QuadratureOptions{1e-12, 52});
}

double beta_root() {
    static const double root = find_root(
        [](double beta) { return beta_integral(beta) - 1.0; }, 1.1, 2.0,
        RootOptions{1e-15, 1e-12, 200});
    return root;
}

double inv_beta() { return 1.0 / beta_root(); }

double pstar_root() {
    static const double root = find_root(
        [](double p) {
            return std::pow(p, (2.0 - p) / (1.0 - p)) - (1.0 - p) * (1.0 - p);
        },
        0.5, 0.7, RootOptions{1e-15, 1e-14, 200});
    return root;
}

double upper_bound(double p) {
    return std::min(power_ratio(p), inv_beta());
}

double lower_bound(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("lower_bound: p must be in (0, 1]");
    const double ps = pstar_root();
    return p >= ps ? power_ratio(p) : power_ratio(ps);
}

ThresholdClp::ThresholdClp(const ThresholdFamily& fam, double p)
    : p_(p), times_(fam.times) {
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("ThresholdClp: p must be in (0, 1]");
    T_.resize(times_.size() + 1);
    T_[0] = 1.0;  // empty product; alpha is zero before t_1 anyway
    double prod = 1.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        prod *= times_[i];
        T_[i + 1] = std::pow(prod, p_);
    }
}

int ThresholdClp::piece_index(double t) const {
    if (t >= 1.0) {
        // Left limit: thresholds equal to 1 switch on only at t = 1 itself,
        // on a set of measure zero.
        return static_cast<int>(
            std::lower_bound(times_.begin(), times_.end(), 1.0) -
            times_.begin());
    }
    return static_cast<int>(
        std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
}

double ThresholdClp::alpha(double t, int s) const {
    if (s < 1) throw std::domain_error("ThresholdClp::alpha: s must be >= 1");
    if (t <= 0.0) return 0.0;
    const int i = piece_index(t);
    if (s > i) return 0.0;
    return T_[i] / std::pow(t, i * p_ + 1.0);
}

double ThresholdClp::prefix_integral(double t) const {
    if (t <= 0.0) return 0.0;
    t = std::min(t, 1.0);
    const int i = piece_index(t);
    double acc = 0.0;
    // integral over [a, b) of j T_j tau^{-jp-1} = (T_j/p)(a^{-jp} - b^{-jp})
    for (int j = 1; j < i; ++j) {
        const double a = times_[j - 1];
        const double b = times_[j];
        acc += T_[j] / p_ * (std::pow(a, -j * p_) - std::pow(b, -j * p_));
    }
    if (i >= 1) {
        const double a = times_[i - 1];
        acc += T_[i] / p_ * (std::pow(a, -i * p_) - std::pow(t, -i * p_));
    }
    return acc;
}

double ThresholdClp::remaining_budget(double t) const {
    return 1.0 - p_ * prefix_integral(t);
}

double ThresholdClp::slack(double t, int s) const {
    return remaining_budget(t) - t * alpha(t, s);
}

double ThresholdClp::constraint_integrand(double t, int k) const {
    if (k < 1)
        throw std::domain_error("constraint_integrand: k must be >= 1");
    if (t <= 0.0 || t > 1.0) return 0.0;
    const int i = piece_index(t);
    if (i < 1) return 0.0;
    const double a = T_[i] / std::pow(t, i * p_ + 1.0);

    // alpha is constant in s on s <= i, so the double sum collapses to
    //   a * t * sum_{l=1}^{k} Prob(Binom(l-1, t) <= i-1).
    std::vector<double> pmf(std::min(i, k), 0.0);
    pmf[0] = 1.0;  // Binom(0, t)
    int filled = 1;
    double total = 0.0;
    for (int l = 1; l <= k; ++l) {
        double cdf = 0.0;
        for (int j = 0; j < filled; ++j) cdf += pmf[j];
        total += cdf;
        // advance pmf to Binom(l, t), truncated above i-1
        const int next_filled = std::min<int>(filled + 1, pmf.size());
        for (int j = next_filled - 1; j >= 0; --j) {
            const double stay = pmf[j] * (1.0 - t);
            const double up = j > 0 ? pmf[j - 1] * t : 0.0;
            pmf[j] = (j < filled ? stay : 0.0) + up;
        }
        filled = next_filled;
    }
    return a * t * total;
}

std::vector<double> ThresholdClp::breakpoints() const {
    std::vector<double> pts{0.0};
    for (double t : times_)
        if (t > 0.0 && t < 1.0) pts.push_back(t);
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

ThresholdClp clp_alpha(const ThresholdFamily& fam, double p) {
    return ThresholdClp(fam, p);
}

GeometricDampingClp::GeometricDampingClp(double eps) : eps_(eps) {
    if (!(eps >= 0.0) || eps >= 1.0)
        throw std::domain_error("GeometricDampingClp: eps must be in [0, 1)");
    const double ps = pstar_root();
    p_ = (1.0 - eps) * ps;
    tau_star_ = std::pow(ps, 1.0 / (1.0 - ps));
    amplitude_ = std::pow(ps, ps / (1.0 - ps));
}

double GeometricDampingClp::constraint_integrand(double t, int k) const {
    if (k < 1)
        throw std::domain_error("constraint_integrand: k must be >= 1");
    if (t < tau_star_ || t > 1.0) return 0.0;
    const double ps = pstar_root();
    const double astar = amplitude_ / std::pow(t, ps + 1.0);
    // sum_{s<=l} eps^{s-1} C(l-1,s-1) t^s (1-t)^{l-s} = t (1-(1-eps)t)^{l-1}
    const double z = 1.0 - (1.0 - eps_) * t;
    double geom;
    if (std::abs(1.0 - z) < 1e-14) {
        geom = static_cast<double>(k);
    } else {
        geom = (1.0 - std::pow(z, k)) / (1.0 - z);
    }
    return astar * t * geom;
}

std::vector<double> GeometricDampingClp::breakpoints() const {
    return {0.0, tau_star_, 1.0};
}

namespace {

template <class Sol>
double constraint_value_impl(const Sol& sol, int k) {
    if (k < 1)
        throw std::domain_error("clp_constraint_value: k must be >= 1");
    const auto pts = sol.breakpoints();
    double integral = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j)
        integral += integrate(
            [&](double t) { return sol.constraint_integrand(t, k); }, pts[j],
            pts[j + 1], QuadratureOptions{1e-11, 48});
    return sol.p() * integral / accept_any_topk_prob(sol.p(), k);
}

template <class Sol>
double gamma_estimate_impl(const Sol& sol, int k_max) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= k_max; ++k)
        best = std::min(best, constraint_value_impl(sol, k));
    return best;
}

}  // namespace

double clp_constraint_value(const ThresholdClp& sol, int k) {
    return constraint_value_impl(sol, k);
}

double clp_constraint_value(const GeometricDampingClp& sol, int k) {
    return constraint_value_impl(sol, k);
}

double clp_gamma_estimate(const ThresholdClp& sol, int k_max) {
    return gamma_estimate_impl(sol, k_max);
}

double clp_gamma_estimate(const GeometricDampingClp& sol, int k_max) {
    return gamma_estimate_impl(sol, k_max);
}

}  // namespace spua
