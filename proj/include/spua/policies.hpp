#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "spua/lp_core.hpp"
#include "spua/polytope.hpp"

namespace spua {

// Nondecreasing horizon fractions 0 < t_1 <= ... <= t_m <= 1; ranks beyond
// the family use the implicit fraction 1.
struct ThresholdFamily {
    std::vector<double> times;

    ThresholdFamily() = default;
    explicit ThresholdFamily(std::vector<double> t);

    double at(int s) const {
        return s <= static_cast<int>(times.size()) ? times[s - 1] : 1.0;
    }
    int size() const { return static_cast<int>(times.size()); }
};

// Nonincreasing nonnegative rank utilities, not identically zero.
struct UtilityVector {
    Eigen::VectorXd values;

    UtilityVector() = default;
    explicit UtilityVector(Eigen::VectorXd v);

    int n() const { return static_cast<int>(values.size()); }
};

// p^{1/(1-p)}, the observation fraction of the optimal single-threshold
// rule; evaluates to the 1/e limit within 1e-12 of p = 1.
double threshold_fraction(double p);

// p^{p/(1-p)} with the same limit handling (1/e at p = 1).
double power_ratio(double p);

// Fraction tau maps to "offer from stage t iff t > ceil(tau * n)".
int threshold_cutoff_stage(double tau, int n);

// Randomized policy realizing an optimal LP solution:
// q(t,s) = t x*(t,s) / (1 - p sum_{tau<t} x*), clamped to [0, 1].
// Throws if the clamp exceeds 1e-7; zero-reach stages get q = 0.
PolicyTable robust_policy_from_lp(const LpSolution& sol, int n, double p);

PolicyTable single_threshold_policy(int n, double p);
PolicyTable multi_threshold_policy(int n, double p, const ThresholdFamily& fam);

struct UtilPolResult {
    PolicyTable policy;
    double value = 0.0;  // optimal expected utility v(1,1)
};

// Utility-optimal rank-based policy by backward induction; ties offer.
UtilPolResult util_pol(int n, double p, const UtilityVector& utility);

// Benchmark that maximizes the probability of selecting the best candidate
// willing to accept, with availability revealed on arrival.  Offers go only
// to contenders: available candidates that beat every available predecessor
// (anything else is a certain loss).  An offer always succeeds and ends the
// process; the decision table applies on top of the contender condition.
struct AvailabilityPolicy {
    int n = 0;
    double p = 1.0;
    Triangular<uint8_t> offer_if_available;
    double value = 0.0;  // optimal success probability
};

AvailabilityPolicy tamaki_model2(int n, double p);

// Win probability of offering to a contender at (t, s): every better-ranked
// candidate still to come must be unavailable.
Triangular<double> tamaki_win_table(int n, double p);

// JSON schema: {"n": int, "p": float, "offer_if_available": [[bool]]}.
std::string availability_policy_to_json(const AvailabilityPolicy& pol);
AvailabilityPolicy availability_policy_from_json(const std::string& text);

}  // namespace spua
