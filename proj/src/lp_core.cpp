#include "spua/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "spua/numerics.hpp"
#include "spua/polytope.hpp"
#include "spua/simplex.hpp"

namespace spua {

LpModel::LpModel(int n, double p, int cap) : n_(n), cap_(cap), p_(p) {
    if (n < 1) throw std::domain_error("LpModel: n must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("LpModel: p must be in (0, 1]");
    if (cap < 1 || cap > n)
        throw std::domain_error("LpModel: cap must be in [1, n]");

    kernel_ = std::make_shared<RankKernel>(n);

    var_offset_.assign(n + 1, 0);
    for (int t = 1; t <= n; ++t)
        var_offset_[t] = var_offset_[t - 1] + std::min(t, cap_);
    num_x_ = var_offset_[n];
    states_.reserve(num_x_);
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= std::min(t, cap_); ++s) states_.emplace_back(t, s);

    one_minus_qk_.resize(cap_);
    for (int k = 1; k <= cap_; ++k)
        one_minus_qk_[k - 1] = accept_any_topk_prob(p, k);

    // Robust weights w_k(t,s) = p Prob(R_t<=k | r_t=s) / (1-(1-p)^k),
    // nonzero only for s <= k.  One rank row per state gives all k at once.
    robust_.resize(cap_);
    std::vector<double> row(n);
    for (int v = 0; v < num_x_; ++v) {
        auto [t, s] = states_[v];
        kernel_->point_row(t, s, row.data());
        double topk = 0.0;
        for (int k = s; k <= cap_; ++k) {
            topk += row[k - 1];
            robust_[k - 1].emplace_back(v, p * topk / one_minus_qk_[k - 1]);
        }
    }
}

int LpModel::var_of(int t, int s) const {
    if (t < 1 || t > n_ || s < 1 || s > std::min(t, cap_))
        throw std::domain_error("LpModel: no variable for that state");
    return var_offset_[t - 1] + (s - 1);
}

void LpModel::row(int r, std::vector<std::pair<int, double>>& coeffs,
                  double& rhs) const {
    coeffs.clear();
    if (r < 0 || r >= num_rows()) throw std::domain_error("LpModel: bad row");
    if (r < num_x_) {
        auto [t, s] = states_[r];
        (void)s;
        const double shared = p_ / t;
        for (int u = 0; u < var_offset_[t - 1]; ++u)
            coeffs.emplace_back(u, shared);
        coeffs.emplace_back(r, 1.0);
        rhs = 1.0 / t;
        return;
    }
    const int k = r - num_x_ + 1;
    for (const auto& [v, w] : robust_[k - 1]) coeffs.emplace_back(v, -w);
    coeffs.emplace_back(gamma_index(), 1.0);
    rhs = 0.0;
}

double LpModel::max_violation(const Triangular<double>& x, double gamma) const {
    if (x.stages() != n_)
        throw std::invalid_argument("max_violation: table size != n");
    double viol = 0.0;
    double offered = 0.0;  // p * sum over earlier stages
    for (int t = 1; t <= n_; ++t) {
        const double bound = (1.0 - offered) / t;
        double stage = 0.0;
        for (int s = 1; s <= t; ++s) {
            const double v = x(t, s);
            viol = std::max(viol, -v);
            if (s <= cap_)
                viol = std::max(viol, v - bound);
            else
                viol = std::max(viol, std::abs(v));  // pruned state
            stage += v;
        }
        offered += p_ * stage;
    }
    for (int k = 1; k <= cap_; ++k) {
        double dot = 0.0;
        for (const auto& [v, w] : robust_[k - 1]) {
            auto [t, s] = states_[v];
            dot += w * x(t, s);
        }
        viol = std::max(viol, gamma - dot);
    }
    return viol;
}

Triangular<double> LpModel::unpack(const Eigen::VectorXd& vars) const {
    Triangular<double> x(n_, 0.0);
    for (int v = 0; v < num_x_; ++v) {
        auto [t, s] = states_[v];
        x(t, s) = vars[v];
    }
    return x;
}

LpModel build_finite_lp(int n, double p) { return LpModel(n, p, n); }

LpModel build_capped_lp(int n, double p, int q) { return LpModel(n, p, q); }

BackwardDpResult rank_utility_dp(const RankKernel& kernel, double p,
                                 const Eigen::VectorXd& rank_utility,
                                 bool offer_on_tie) {
    const int n = kernel.n();
    BackwardDpResult res;
    res.offer = Triangular<uint8_t>(n, 0);
    Triangular<double> expected = rank_utility_table(kernel, rank_utility);
    std::vector<double> next(n + 2, 0.0), cur(n + 1, 0.0);
    for (int t = n; t >= 1; --t) {
        double vsum = 0.0;
        if (t < n)
            for (int s = 1; s <= t + 1; ++s) vsum += next[s];
        const double cont = vsum / (t + 1);
        for (int s = 1; s <= t; ++s) {
            const double w = expected(t, s);
            const bool offer = offer_on_tie ? (w >= cont) : (w > cont);
            res.offer(t, s) = offer ? 1 : 0;
            cur[s] = cont + p * std::max(w - cont, 0.0);
        }
        for (int s = 1; s <= t; ++s) next[s] = cur[s];
    }
    res.value = cur[1];
    return res;
}

namespace {

Eigen::VectorXd rank_utility_from_weights(const LpModel& model,
                                          const Eigen::VectorXd& u) {
    // W_i = sum_{k>=i} u_k / (1-(1-p)^k); u lives on the robust rows.
    const int n = model.n();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    double suffix = 0.0;
    for (int k = model.num_robust_rows(); k >= 1; --k) {
        suffix += u[k - 1] / model.accept_weight(k);
        w[k - 1] = suffix;
    }
    return w;
}

// Collect payoffs f_k = p sum x topk / (1-(1-p)^k) for every robust row.
Eigen::VectorXd collect_payoffs(const LpModel& model,
                                const Triangular<double>& x) {
    const int n = model.n();
    const int kmax = model.num_robust_rows();
    Eigen::VectorXd per_rank = Eigen::VectorXd::Zero(n);
    std::vector<double> row(n);
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s) {
            const double xv = x(t, s);
            if (xv == 0.0) continue;
            model.kernel().point_row(t, s, row.data());
            for (int i = s - 1; i <= n - t + s - 1; ++i)
                per_rank[i] += xv * row[i];
        }
    Eigen::VectorXd f(kmax);
    double acc = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        acc += per_rank[k - 1];
        f[k - 1] = model.p() * acc / model.accept_weight(k);
    }
    return f;
}

Triangular<double> occupancy_of_offer_table(const LpModel& model,
                                            const Triangular<uint8_t>& offer) {
    PolicyTable policy(model.n(), model.p());
    for (int t = 1; t <= model.n(); ++t)
        for (int s = 1; s <= t; ++s) policy.q(t, s) = offer(t, s) ? 1.0 : 0.0;
    return policy_to_occupancy(policy).x;
}

LpSolution solve_dense(const LpModel& model, const SolveOptions& options) {
    const int rows = model.num_rows();
    const int vars = model.num_vars();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, vars);
    Eigen::VectorXd b(rows);
    std::vector<std::pair<int, double>> coeffs;
    double rhs;
    for (int r = 0; r < rows; ++r) {
        model.row(r, coeffs, rhs);
        for (const auto& [v, a] : coeffs) A(r, v) = a;
        b[r] = rhs;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
    c[model.gamma_index()] = 1.0;

    SimplexOptions sopts;
    sopts.tol = options.tol;
    sopts.max_iterations = options.max_iterations;
    SimplexResult sr = simplex_maximize(
        A, b, c, std::vector<RowSense>(rows, RowSense::le), sopts);

    LpSolution sol;
    sol.iterations = sr.iterations;
    sol.x = model.unpack(sr.x);
    sol.gamma = sr.x[model.gamma_index()];
    switch (sr.status) {
        case SimplexStatus::optimal:
            sol.status = LpStatus::optimal;
            break;
        case SimplexStatus::iteration_limit:
            sol.status = LpStatus::iteration_limit;
            break;
        default:
            sol.status = LpStatus::numerical_failure;
            break;
    }
    if (sol.status == LpStatus::optimal &&
        model.max_violation(sol.x, sol.gamma) > 10.0 * options.tol)
        sol.status = LpStatus::numerical_failure;
    return sol;
}

LpSolution solve_column_generation(const LpModel& model,
                                   const SolveOptions& options) {
    const int kmax = model.num_robust_rows();

    struct Column {
        Triangular<double> x;
        Eigen::VectorXd f;
    };
    std::vector<Column> columns;
    std::set<std::vector<uint8_t>> seen;

    auto add_offer_column = [&](const Triangular<uint8_t>& offer) -> bool {
        if (!seen.insert(offer.flat()).second) return false;
        Column col;
        col.x = occupancy_of_offer_table(model, offer);
        col.f = collect_payoffs(model, col.x);
        columns.push_back(std::move(col));
        return true;
    };

    // Warm start: the single-threshold rule and the best response to uniform
    // weights over the robust rows.
    {
        const double p = model.p();
        const double frac =
            p >= 1.0 - 1e-12 ? std::exp(-1.0) : std::pow(p, 1.0 / (1.0 - p));
        const int cutoff = static_cast<int>(
            std::ceil(frac * model.n() - 1e-12));
        Triangular<uint8_t> offer(model.n(), 0);
        for (int t = cutoff + 1; t <= model.n(); ++t) offer(t, 1) = 1;
        add_offer_column(offer);

        Eigen::VectorXd uniform =
            Eigen::VectorXd::Constant(kmax, 1.0 / kmax);
        BackwardDpResult br = rank_utility_dp(model.kernel(), model.p(),
                                  rank_utility_from_weights(model, uniform),
                                  /*offer_on_tie=*/false);
        add_offer_column(br.offer);
    }

    LpSolution sol;
    double upper = 1.0;
    const int max_rounds = std::min(options.max_iterations, 20000);
    SimplexOptions master_opts;
    master_opts.tol = 1e-11;

    for (int round = 1; round <= max_rounds; ++round) {
        const int J = static_cast<int>(columns.size());
        // Master game: max gamma s.t. gamma <= sum_j lambda_j f_j[k],
        // lambda in the simplex.  Variable 0 is gamma.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kmax + 1, J + 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(kmax + 1);
        std::vector<RowSense> sense(kmax + 1, RowSense::le);
        for (int k = 0; k < kmax; ++k) {
            A(k, 0) = 1.0;
            for (int j = 0; j < J; ++j) A(k, j + 1) = -columns[j].f[k];
        }
        for (int j = 0; j < J; ++j) A(kmax, j + 1) = 1.0;
        b[kmax] = 1.0;
        sense[kmax] = RowSense::eq;
        Eigen::VectorXd c = Eigen::VectorXd::Zero(J + 1);
        c[0] = 1.0;

        SimplexResult master = simplex_maximize(A, b, c, sense, master_opts);
        if (master.status != SimplexStatus::optimal) {
            sol.status = LpStatus::numerical_failure;
            sol.iterations = round;
            return sol;
        }
        const double lower = master.objective;

        // Dual weights over the robust rows drive the pricing DP.
        Eigen::VectorXd u = master.duals.head(kmax).cwiseMax(0.0);
        const double usum = u.sum();
        u = usum > 0.0 ? Eigen::VectorXd(u / usum)
                       : Eigen::VectorXd(Eigen::VectorXd::Constant(
                             kmax, 1.0 / kmax));

        BackwardDpResult br = rank_utility_dp(model.kernel(), model.p(),
                                  rank_utility_from_weights(model, u),
                                  /*offer_on_tie=*/false);
        upper = std::min(upper, br.value);

        if (upper - lower <= options.gap_tol || !add_offer_column(br.offer)) {
            sol.gamma = lower;
            sol.x = Triangular<double>(model.n(), 0.0);
            for (int j = 0; j < J; ++j) {
                const double lam = master.x[j + 1];
                if (lam <= 0.0) continue;
                const auto& flat = columns[j].x.flat();
                for (std::size_t i = 0; i < flat.size(); ++i)
                    sol.x.flat()[i] += lam * flat[i];
            }
            sol.iterations = round;
            sol.status = upper - lower <= 10.0 * options.gap_tol
                             ? LpStatus::optimal
                             : LpStatus::iteration_limit;
            if (sol.status == LpStatus::optimal &&
                model.max_violation(sol.x, sol.gamma) > 10.0 * options.tol)
                sol.status = LpStatus::numerical_failure;
            return sol;
        }
    }
    sol.status = LpStatus::iteration_limit;
    sol.iterations = max_rounds;
    return sol;
}

}  // namespace

LpSolution solve_lp(const LpModel& model, const SolveOptions& options) {
    switch (options.method) {
        case SolveOptions::Method::dense_simplex:
            return solve_dense(model, options);
        case SolveOptions::Method::column_generation:
            return solve_column_generation(model, options);
        case SolveOptions::Method::automatic:
        default:
            break;
    }
    // Column generation first: its iterates are convex combinations of
    // exact policy occupancies, so the returned point sits on the polytope
    // to machine precision and carries a weak-duality certificate.  The
    // tableau covers small models if the master ever stalls.
    LpSolution sol = solve_column_generation(model, options);
    if (sol.status == LpStatus::optimal ||
        model.num_vars() > options.dense_cutover)
        return sol;
    LpSolution retry = solve_dense(model, options);
    retry.iterations += sol.iterations;
    return retry;
}

double dual_dp_value(int n, double p, const Eigen::VectorXd& u) {
    if (n < 1) throw std::domain_error("dual_dp_value: n must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("dual_dp_value: p must be in (0, 1]");
    if (u.size() != n)
        throw std::domain_error("dual_dp_value: weight vector must have size n");
    if ((u.array() < -1e-15).any())
        throw std::domain_error("dual_dp_value: weights must be nonnegative");
    if (u.sum() < 1.0 - 1e-12)
        throw std::domain_error("dual_dp_value: weights must sum to >= 1");

    RankKernel kernel(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    double suffix = 0.0;
    for (int k = n; k >= 1; --k) {
        suffix += u[k - 1] / accept_any_topk_prob(p, k);
        w[k - 1] = suffix;
    }
    return rank_utility_dp(kernel, p, w, /*offer_on_tie=*/false).value;
}

void export_lp_text(const LpModel& model, std::ostream& out) {
    char buf[64];
    auto fixed = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12f", v);
        return std::string(buf);
    };
    out << "\\ robust-ratio LP: n=" << model.n() << " p=" << model.p()
        << " cap=" << model.cap() << "\n";
    out << "Maximize\n obj: gamma\nSubject To\n";
    std::vector<std::pair<int, double>> coeffs;
    double rhs;
    for (int r = 0; r < model.num_rows(); ++r) {
        model.row(r, coeffs, rhs);
        if (r < model.num_dynamic_rows()) {
            auto [t, s] = model.state_of(r);
            out << " dyn_" << t << "_" << s << ":";
        } else {
            out << " rob_" << (r - model.num_dynamic_rows() + 1) << ":";
        }
        for (const auto& [v, a] : coeffs) {
            std::string name = v == model.gamma_index()
                                   ? "gamma"
                                   : [&] {
                                         auto [t, s] = model.state_of(v);
                                         return "x_" + std::to_string(t) + "_" +
                                                std::to_string(s);
                                     }();
            out << (a >= 0 ? " + " : " - ") << fixed(std::abs(a)) << " "
                << name;
        }
        out << " <= " << fixed(rhs) << "\n";
    }
    out << "Bounds\n gamma >= 0\nEnd\n";
}

}  // namespace spua
