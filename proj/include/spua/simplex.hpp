#pragma once

#include <Eigen/Core>
#include <vector>

namespace spua {

enum class SimplexStatus {
    optimal,
    iteration_limit,
    infeasible,
    unbounded,
    numerical_failure
};

enum class RowSense { le, eq };

struct SimplexResult {
    SimplexStatus status = SimplexStatus::numerical_failure;
    double objective = 0.0;
    Eigen::VectorXd x;      // structural variables
    Eigen::VectorXd duals;  // one multiplier per row
    int iterations = 0;
};

struct SimplexOptions {
    double tol = 1e-9;            // feasibility / reduced-cost tolerance
    int max_iterations = 200000;
    int stall_before_bland = 64;  // degenerate pivots before Bland's rule
    bool scale_rows = true;       // normalize rows to unit max coefficient
};

// Maximizes c^T z over {z >= 0 : A z (<=|=) b} with b >= 0, by a two-phase
// dense tableau method.  Dantzig pricing switches to Bland's rule after a
// degeneracy stall; ratio-test ties break at the lowest row index, so the
// result is deterministic for identical input.
SimplexResult simplex_maximize(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b,
                               const Eigen::VectorXd& c,
                               const std::vector<RowSense>& sense,
                               const SimplexOptions& options = {});

}  // namespace spua
