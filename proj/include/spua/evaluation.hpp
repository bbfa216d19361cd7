#pragma once

#include <Eigen/Core>
#include <string>

#include "spua/policies.hpp"
#include "spua/polytope.hpp"

namespace spua {

// Exact (non-simulated) evaluation of a policy via its occupancy measure.
struct EvaluationReport {
    int n = 0;
    double p = 1.0;
    Eigen::VectorXd collect;  // Prob(collect a top-k candidate), k = 1..n
    Eigen::VectorXd ratios;   // collect[k] / (1 - (1-p)^k)
    double gamma = 0.0;       // min over k of ratios
    int argmin_k = 1;
};

// Prob(policy collects a candidate of overall rank i), all i at once.
Eigen::VectorXd collect_rank_distribution(const PolicyTable& policy);

double collect_topk_prob(const PolicyTable& policy, int k);
double collect_rank_prob(const PolicyTable& policy, int i);

EvaluationReport robust_ratio(const PolicyTable& policy);

double expected_utility(const PolicyTable& policy, const UtilityVector& u);

// E[U(OPT)] = sum_i U_i p (1-p)^{i-1}: the prophet that knows who accepts.
double opt_offline_utility(int n, double p, const UtilityVector& u);

// Exact forward pass of an availability-aware rule over the states
// (stage, rank of the best available candidate so far): probability of
// ending the process on a candidate of each overall rank.
Eigen::VectorXd availability_collect_rank_distribution(
    const AvailabilityPolicy& pol);

double availability_expected_utility(const AvailabilityPolicy& pol,
                                     const UtilityVector& u);

// JSON schema: {"gamma": float, "argmin_k": int, "ratios": [...],
// "collect": [...]}.
std::string report_to_json(const EvaluationReport& report);

}  // namespace spua
