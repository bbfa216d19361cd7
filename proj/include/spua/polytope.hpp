#pragma once

#include <string>

#include "spua/triangular.hpp"

namespace spua {

// Randomized Markov policy: offer probability q(t, s) at every state.
struct PolicyTable {
    int n = 0;
    double p = 1.0;
    Triangular<double> q;

    PolicyTable() = default;
    PolicyTable(int n, double p);

    // Throws std::invalid_argument on out-of-range n, p or entries.
    void validate() const;

    bool operator==(const PolicyTable&) const = default;
};

// Point of the policy polytope: x(t,s) = Prob(reach (t,s) and offer),
// y(t,s) = Prob(reach (t,s) and pass).
struct OccupancyMeasure {
    int n = 0;
    double p = 1.0;
    Triangular<double> x, y;

    OccupancyMeasure() = default;
    OccupancyMeasure(int n, double p);
};

// Forward recursion over stages; always valid for a valid policy.
OccupancyMeasure policy_to_occupancy(const PolicyTable& policy);

// Inverse map.  Checks the polytope invariants within `tol` and throws
// std::invalid_argument beyond it.  States with zero reach get q = 0.
PolicyTable occupancy_to_policy(const OccupancyMeasure& occ, double tol = 1e-10);

// 1 - p * sum_{tau < t} sum_s x(tau, s): probability the process is still
// running when candidate t arrives.
double reach_probability(const OccupancyMeasure& occ, int t);

// JSON schema: {"n": int, "p": float, "q": [[float]]} with q[t-1] of length t.
std::string policy_to_json(const PolicyTable& policy);
PolicyTable policy_from_json(const std::string& text);

}  // namespace spua
