#pragma once

#include <limits>
#include <vector>

#include "spua/policies.hpp"

namespace spua {

// One point of the bounds curve over p.
struct BoundCurvePoint {
    double p = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double gamma_n = std::numeric_limits<double>::quiet_NaN();
};

// integral_0^1 dy / (y(1 - log y) + beta - 1)
double beta_integral(double beta);

// Unique root of beta_integral(beta) = 1; 1/beta ~ 0.745 is the i.i.d.
// prophet-inequality constant.  Cached after the first call.
double beta_root();
double inv_beta();

// Unique root of p^{(2-p)/(1-p)} = (1-p)^2 in (0.5, 0.7), ~0.594.  Above it
// the single-threshold rule is asymptotically optimal.  Cached.
double pstar_root();

// min{p^{p/(1-p)}, 1/beta}
double upper_bound(double p);

// p^{p/(1-p)} for p >= p*, frozen at the p* value below.
double lower_bound(double p);

// Piecewise solution of the continuous LP built from threshold times
// (alpha(t,s) = T_i / t^{ip+1} on [t_i, t_{i+1}) for s <= i, T_i the
// p-th power of the product of the first i times).
class ThresholdClp {
public:
    ThresholdClp(const ThresholdFamily& fam, double p);

    double p() const { return p_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& coefficients() const { return T_; }

    int piece_index(double t) const;  // #{j : t_j <= t}, left limit at 1
    double alpha(double t, int s) const;

    // Analytic integral_0^t of sum_s alpha.
    double prefix_integral(double t) const;

    // 1 - p * prefix_integral(t); telescopes to T_i t^{-ip} on each piece.
    double remaining_budget(double t) const;

    // Dynamic-constraint slack: remaining_budget(t) - t*alpha(t,s).
    double slack(double t, int s) const;

    // sum_s alpha(t,s) sum_{l=s}^{k} C(l-1,s-1) t^s (1-t)^{l-s}
    double constraint_integrand(double t, int k) const;

    std::vector<double> breakpoints() const;  // {0, t_1, ..., 1}

private:
    double p_;
    std::vector<double> times_;  // family times as given
    std::vector<double> T_;      // T_i for i = 0..m
};

ThresholdClp clp_alpha(const ThresholdFamily& fam, double p);

// Solution for p = (1-eps) p* built by geometric damping of the p* solution:
// alpha(t,s) = eps^{s-1} alpha*(t,1) on [tau*, 1].
class GeometricDampingClp {
public:
    explicit GeometricDampingClp(double eps);

    double p() const { return p_; }
    double eps() const { return eps_; }
    double tau_star() const { return tau_star_; }

    double constraint_integrand(double t, int k) const;
    std::vector<double> breakpoints() const;

private:
    double eps_, p_, tau_star_, amplitude_;
};

// p/(1-(1-p)^k) times the integral of the k-th constraint integrand.
double clp_constraint_value(const ThresholdClp& sol, int k);
double clp_constraint_value(const GeometricDampingClp& sol, int k);

// min over k <= k_max of the constraint values.
double clp_gamma_estimate(const ThresholdClp& sol, int k_max = 200);
double clp_gamma_estimate(const GeometricDampingClp& sol, int k_max = 200);

}  // namespace spua
