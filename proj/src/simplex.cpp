#include "spua/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace spua {

namespace {

class Tableau {
public:
    Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
            const Eigen::VectorXd& c, const std::vector<RowSense>& sense,
            const SimplexOptions& opts)
        : opts_(opts),
          m_(static_cast<int>(A.rows())),
          n_struct_(static_cast<int>(A.cols())) {
        if (b.size() != m_ || c.size() != n_struct_ ||
            static_cast<int>(sense.size()) != m_)
            throw std::invalid_argument("simplex: inconsistent dimensions");
        if ((b.array() < 0.0).any())
            throw std::invalid_argument("simplex: rhs must be nonnegative");

        slack_col_.assign(m_, -1);
        art_col_.assign(m_, -1);
        int n_slack = 0, n_art = 0;
        for (int i = 0; i < m_; ++i)
            (sense[i] == RowSense::le ? n_slack : n_art)++;

        cols_ = n_struct_ + n_slack + n_art;
        first_art_ = n_struct_ + n_slack;
        T_.setZero(m_, cols_ + 1);  // last column is the rhs
        scale_.setOnes(m_);

        for (int i = 0; i < m_; ++i) {
            double mx = A.row(i).cwiseAbs().maxCoeff();
            if (opts_.scale_rows && mx > 0.0) scale_[i] = 1.0 / mx;
            T_.row(i).head(n_struct_) = A.row(i) * scale_[i];
            T_(i, cols_) = b[i] * scale_[i];
        }

        basis_.assign(m_, -1);
        int slack_at = n_struct_, art_at = first_art_;
        for (int i = 0; i < m_; ++i) {
            if (sense[i] == RowSense::le) {
                slack_col_[i] = slack_at;
                T_(i, slack_at) = 1.0;
                basis_[i] = slack_at++;
            } else {
                art_col_[i] = art_at;
                T_(i, art_at) = 1.0;
                basis_[i] = art_at++;
            }
        }

        cost_.setZero(cols_);
        cost_.head(n_struct_) = c;
    }

    SimplexResult run() {
        SimplexResult res;
        res.iterations = 0;

        if (first_art_ < cols_) {
            // Phase 1: maximize minus the sum of artificials.
            Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols_);
            phase1.segment(first_art_, cols_ - first_art_).setConstant(-1.0);
            set_objective(phase1);
            SimplexStatus st = iterate(res.iterations, /*allow_art=*/true);
            if (st != SimplexStatus::optimal) {
                res.status = st;
                return res;
            }
            if (objective_value() < -opts_.tol) {
                res.status = SimplexStatus::infeasible;
                return res;
            }
            // Drive leftover basic artificials out; rows where no pivot
            // exists are redundant and stay inert (all enterable entries 0).
            for (int i = 0; i < m_; ++i) {
                if (basis_[i] < first_art_) continue;
                for (int j = 0; j < first_art_; ++j) {
                    if (std::abs(T_(i, j)) > opts_.tol) {
                        pivot(i, j);
                        break;
                    }
                }
            }
        }

        set_objective(cost_);
        res.status = iterate(res.iterations, /*allow_art=*/false);

        res.x = Eigen::VectorXd::Zero(n_struct_);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_struct_) res.x[basis_[i]] = T_(i, cols_);
        res.objective = cost_.head(n_struct_).dot(res.x);

        res.duals = Eigen::VectorXd::Zero(m_);
        for (int i = 0; i < m_; ++i) {
            int col = slack_col_[i] >= 0 ? slack_col_[i] : art_col_[i];
            res.duals[i] = obj_[col] * scale_[i];
        }
        return res;
    }

private:
    void set_objective(const Eigen::VectorXd& c) {
        // obj_[j] = z_j - c_j for the current basis.
        obj_ = -c;
        obj_rhs_ = 0.0;
        for (int i = 0; i < m_; ++i) {
            double cb = c[basis_[i]];
            if (cb != 0.0) {
                obj_ += cb * T_.row(i).head(cols_);
                obj_rhs_ += cb * T_(i, cols_);
            }
        }
    }

    double objective_value() const { return obj_rhs_; }

    SimplexStatus iterate(int& iterations, bool allow_art) {
        int degenerate_run = 0;
        bool bland = false;
        while (true) {
            if (iterations >= opts_.max_iterations)
                return SimplexStatus::iteration_limit;

            const int limit = allow_art ? cols_ : first_art_;
            int enter = -1;
            if (bland) {
                for (int j = 0; j < limit; ++j)
                    if (obj_[j] < -opts_.tol) {
                        enter = j;
                        break;
                    }
            } else {
                double best = -opts_.tol;
                for (int j = 0; j < limit; ++j)
                    if (obj_[j] < best) {
                        best = obj_[j];
                        enter = j;
                    }
            }
            if (enter < 0) return SimplexStatus::optimal;

            // Two-pass ratio test: find the minimum ratio, then among rows
            // within a tight window prefer the largest pivot (tiny pivots
            // amplify roundoff); remaining ties go to the lowest basic
            // variable index, which with Bland entering prevents cycling.
            const double pivot_tol = 1e-7;
            double best_ratio = std::numeric_limits<double>::infinity();
            bool any_column = false;
            for (int i = 0; i < m_; ++i) {
                double a = T_(i, enter);
                if (a > opts_.tol) any_column = true;
                if (a > pivot_tol)
                    best_ratio =
                        std::min(best_ratio, std::max(0.0, T_(i, cols_) / a));
            }
            if (best_ratio == std::numeric_limits<double>::infinity()) {
                if (!any_column) return SimplexStatus::unbounded;
                // only tiny pivots available: fall back to the loose cutoff
                for (int i = 0; i < m_; ++i) {
                    double a = T_(i, enter);
                    if (a > opts_.tol)
                        best_ratio = std::min(
                            best_ratio, std::max(0.0, T_(i, cols_) / a));
                }
            }
            const double window = best_ratio + 1e-9 * (1.0 + best_ratio);
            int leave = -1;
            double best_pivot = 0.0;
            for (int i = 0; i < m_; ++i) {
                double a = T_(i, enter);
                if (a <= opts_.tol) continue;
                double ratio = std::max(0.0, T_(i, cols_) / a);
                if (ratio > window) continue;
                const bool better =
                    bland ? (leave < 0 || basis_[i] < basis_[leave])
                          : (a > best_pivot + 1e-12 ||
                             (a > best_pivot - 1e-12 &&
                              (leave < 0 || basis_[i] < basis_[leave])));
                if (better) {
                    leave = i;
                    best_pivot = a;
                }
            }
            if (leave < 0) return SimplexStatus::unbounded;

            if (best_ratio <= 1e-12) {
                if (++degenerate_run >= opts_.stall_before_bland) bland = true;
            } else {
                degenerate_run = 0;
            }

            pivot(leave, enter);
            ++iterations;
        }
    }

    void pivot(int row, int col) {
        double piv = T_(row, col);
        T_.row(row) /= piv;
        T_(row, col) = 1.0;  // kill roundoff on the pivot itself
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            double f = T_(i, col);
            if (f != 0.0) {
                T_.row(i) -= f * T_.row(row);
                T_(i, col) = 0.0;
            }
        }
        double f = obj_[col];
        if (f != 0.0) {
            obj_ -= f * T_.row(row).head(cols_);
            obj_rhs_ -= f * T_(row, cols_);
            obj_[col] = 0.0;
        }
        basis_[row] = col;
    }

    SimplexOptions opts_;
    int m_, n_struct_, cols_ = 0, first_art_ = 0;
    Eigen::MatrixXd T_;
    Eigen::RowVectorXd obj_;
    double obj_rhs_ = 0.0;
    Eigen::VectorXd cost_, scale_;
    std::vector<int> basis_, slack_col_, art_col_;
};

}  // namespace

SimplexResult simplex_maximize(const Eigen::MatrixXd& A,
                               const Eigen::VectorXd& b,
                               const Eigen::VectorXd& c,
                               const std::vector<RowSense>& sense,
                               const SimplexOptions& options) {
    Tableau tab(A, b, c, sense, options);
    return tab.run();
}

}  // namespace spua
