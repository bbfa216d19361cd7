#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "spua/rank_stats.hpp"
#include "spua/triangular.hpp"

namespace spua {

enum class LpStatus { optimal, iteration_limit, numerical_failure };

struct LpSolution {
    double gamma = 0.0;
    Triangular<double> x;  // offer occupancies; pruned states stay 0
    LpStatus status = LpStatus::numerical_failure;
    int iterations = 0;
};

// The robust-ratio linear program
//
//   max gamma
//   s.t. x(t,s) <= (1/t) (1 - p sum_{tau<t} sum_sigma x(tau,sigma))   (dynamic)
//        gamma <= p/(1-(1-p)^k) sum_{t,s} x(t,s) Prob(R_t<=k|r_t=s)   (robust)
//
// with one x variable per state (t, s), s <= min(t, cap), robust rows for
// k in [cap], and gamma as the last variable.  Dynamic rows are parametric
// in (t, s) — materializing them would cost Theta(n^4) coefficients — so the
// model stores them implicitly and only the robust rows explicitly; row()
// reconstructs any row on demand.
class LpModel {
public:
    int n() const { return n_; }
    double p() const { return p_; }
    int cap() const { return cap_; }

    int num_x() const { return num_x_; }
    int num_vars() const { return num_x_ + 1; }
    int gamma_index() const { return num_x_; }
    int num_dynamic_rows() const { return num_x_; }
    int num_robust_rows() const { return cap_; }
    int num_rows() const { return num_x_ + cap_; }

    // Variable <-> state maps (s <= min(t, cap)).
    int var_of(int t, int s) const;
    std::pair<int, int> state_of(int v) const { return states_[v]; }

    // Row r < num_dynamic_rows(): the dynamic row of state_of(r).
    // Row num_dynamic_rows() + (k-1): robust row k.  Every row has sense <=.
    void row(int r, std::vector<std::pair<int, double>>& coeffs,
             double& rhs) const;

    // Robust row k as (variable, weight) pairs of
    // gamma <= sum w(t,s) x(t,s), i.e. the weights on the x side.
    const std::vector<std::pair<int, double>>& robust_weights(int k) const {
        return robust_[k - 1];
    }
    double accept_weight(int k) const { return one_minus_qk_[k - 1]; }

    // Largest constraint violation of (x, gamma); negative x counts too.
    double max_violation(const Triangular<double>& x, double gamma) const;

    const RankKernel& kernel() const { return *kernel_; }

    Triangular<double> unpack(const Eigen::VectorXd& vars) const;

    friend LpModel build_finite_lp(int n, double p);
    friend LpModel build_capped_lp(int n, double p, int q);

private:
    LpModel(int n, double p, int cap);

    int n_, cap_, num_x_;
    double p_;
    std::vector<int> var_offset_;               // per stage
    std::vector<std::pair<int, int>> states_;   // var -> (t, s)
    std::vector<std::vector<std::pair<int, double>>> robust_;
    std::vector<double> one_minus_qk_;
    std::shared_ptr<const RankKernel> kernel_;
};

LpModel build_finite_lp(int n, double p);
LpModel build_capped_lp(int n, double p, int q);

struct SolveOptions {
    enum class Method { automatic, dense_simplex, column_generation };
    Method method = Method::automatic;
    double tol = 1e-9;        // primal feasibility / optimality
    double gap_tol = 1e-10;   // column generation duality gap
    int max_iterations = 200000;
    int dense_cutover = 600;  // automatic: dense simplex up to this many vars
};

// Deterministic for a fixed model and options; the returned point is checked
// against the model and never reported optimal if it violates a constraint
// beyond the tolerance.
LpSolution solve_lp(const LpModel& model, const SolveOptions& options = {});

// Backward induction bound of the dual program: utilities
// U_i = p sum_{k>=i} u_k / (1-(1-p)^k), value v(1,1) >= gamma*_n.
// Requires u >= 0 with sum u_i >= 1.
double dual_dp_value(int n, double p, const Eigen::VectorXd& u);

struct BackwardDpResult {
    double value = 0.0;
    Triangular<uint8_t> offer;
};

// Optimality recursion of the utility MDP: offering at (t,s) is worth
// p*W_t(s) + (1-p)*cont against cont for passing, where W_t(s) is the
// expected utility of the current candidate under the per-rank utilities.
// Used by the dual bound, by column-generation pricing (ties pass) and by
// the utility-optimal policy (ties offer).
BackwardDpResult rank_utility_dp(const RankKernel& kernel, double p,
                                 const Eigen::VectorXd& rank_utility,
                                 bool offer_on_tie);

// Plain-text export (CPLEX LP format, fixed-point coefficients) for
// cross-validation with external solvers.
void export_lp_text(const LpModel& model, std::ostream& out);

}  // namespace spua
