// Command-line front end: solve the robust-ratio LP, evaluate and simulate
// policies, sweep the asymptotic bounds, and run the utility experiments.
//
// Exit codes: 0 success, 1 input error, 2 numeric failure.

#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spua/asymptotics.hpp"
#include "spua/evaluation.hpp"
#include "spua/lp_core.hpp"
#include "spua/montecarlo.hpp"
#include "spua/numerics.hpp"
#include "spua/policies.hpp"
#include "spua/polytope.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
    out << text;
}

struct GridFlags {
    std::string list;
    double pmin = 0.0, pmax = 0.0, step = 0.0;
};

std::vector<double> parse_grid(const GridFlags& g) {
    std::vector<double> grid;
    if (!g.list.empty()) {
        std::stringstream ss(g.list);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            grid.push_back(std::stod(tok));
        }
    } else if (g.step > 0.0) {
        for (double v = g.pmin; v <= g.pmax + 0.5 * g.step; v += g.step)
            grid.push_back(v);
    }
    if (grid.empty())
        throw std::invalid_argument("empty p grid: pass --p-list or --p-min/--p-max/--p-step");
    for (double v : grid)
        if (!(v > 0.0) || v > 1.0)
            throw std::invalid_argument("grid value " + fmt12(v) + " outside (0, 1]");
    return grid;
}

template <class Fn>
void parallel_rows(int count, int threads, Fn&& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            int i;
            while ((i = next.fetch_add(1)) < count) fn(i);
        });
    for (auto& t : pool) t.join();
}

spua::UtilityVector make_utility(const std::string& kind, int n, int k,
                                 double delta) {
    Eigen::VectorXd u(n);
    if (kind == "topk") {
        if (k < 1 || k > n) throw std::invalid_argument("--k outside [1, n]");
        const double eps = 1.0 / n;
        double pw = 1.0;
        for (int i = 1; i <= n; ++i) {
            pw *= eps;  // eps^i
            u[i - 1] = (i <= k ? 1.0 : 0.0) + pw;
        }
    } else if (kind == "powerlaw") {
        if (!(delta > 0.0)) throw std::invalid_argument("--delta must be > 0");
        for (int i = 1; i <= n; ++i)
            u[i - 1] = std::pow(static_cast<double>(i), -1.0 / (1.0 + delta));
    } else {
        throw std::invalid_argument("unknown utility kind: " + kind);
    }
    return spua::UtilityVector(std::move(u));
}

spua::SolveOptions::Method parse_method(const std::string& name) {
    if (name == "auto") return spua::SolveOptions::Method::automatic;
    if (name == "simplex") return spua::SolveOptions::Method::dense_simplex;
    if (name == "colgen") return spua::SolveOptions::Method::column_generation;
    throw std::invalid_argument("unknown method: " + name);
}

int default_cap(int n, double p) {
    int q = static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / p));
    return std::clamp(q, 1, n);
}

int run_solve(int n, double p, int cap_flag, bool full,
              const std::string& out, const std::string& export_path,
              const std::string& method) {
    const int cap = full ? n : (cap_flag > 0 ? cap_flag : default_cap(n, p));
    spua::LpModel model = cap >= n ? spua::build_finite_lp(n, p)
                                   : spua::build_capped_lp(n, p, cap);
    if (!export_path.empty()) {
        std::ofstream lp(export_path);
        if (!lp) throw std::invalid_argument("cannot open " + export_path);
        spua::export_lp_text(model, lp);
    }
    spua::SolveOptions opts;
    opts.method = parse_method(method);
    spua::LpSolution sol = spua::solve_lp(model, opts);
    if (sol.status != spua::LpStatus::optimal) {
        std::cerr << "solver failed: "
                  << (sol.status == spua::LpStatus::iteration_limit
                          ? "iteration limit"
                          : "numerical failure")
                  << " after " << sol.iterations << " iterations\n";
        return kExitNumeric;
    }

    spua::PolicyTable policy = spua::robust_policy_from_lp(sol, n, p);
    spua::EvaluationReport report = spua::robust_ratio(policy);

    std::cout << "n=" << n << " p=" << fmt12(p) << " cap=" << cap << "\n";
    if (cap < n) {
        const double corr = spua::accept_any_topk_prob(p, cap);
        std::cout << "gamma(n," << cap << ") = " << fmt12(sol.gamma)
                  << "  (capped LP optimum)\n"
                  << "certified interval for gamma_n*: ["
                  << fmt12(corr * sol.gamma) << ", " << fmt12(sol.gamma)
                  << "]\n";
    } else {
        std::cout << "gamma_n* = " << fmt12(sol.gamma) << "\n";
    }
    std::cout << "policy robust ratio = " << fmt12(report.gamma)
              << " (argmin k = " << report.argmin_k << ")\n"
              << "iterations = " << sol.iterations << ", status = optimal\n";
    if (!out.empty()) {
        write_file(out, spua::policy_to_json(policy));
        std::cout << "wrote policy to " << out << "\n";
    }
    return kExitOk;
}

int run_eval(const std::string& policy_path, int n_flag, double p_flag,
             const std::string& utility, int k, double delta,
             const std::string& out) {
    spua::PolicyTable policy = spua::policy_from_json(read_file(policy_path));
    if (n_flag > 0 && n_flag != policy.n)
        throw std::invalid_argument("--n does not match the policy file");
    if (p_flag > 0.0 && std::abs(p_flag - policy.p) > 1e-12)
        throw std::invalid_argument("--p does not match the policy file");

    spua::EvaluationReport report = spua::robust_ratio(policy);
    nlohmann::json j = nlohmann::json::parse(spua::report_to_json(report));
    if (!utility.empty()) {
        spua::UtilityVector u = make_utility(utility, policy.n, k, delta);
        const double eu = spua::expected_utility(policy, u);
        const double opt = spua::opt_offline_utility(policy.n, policy.p, u);
        j["expected_utility"] = eu;
        j["opt_offline_utility"] = opt;
        j["utility_ratio"] = eu / opt;
    }
    std::cout << "gamma = " << fmt12(report.gamma)
              << " (argmin k = " << report.argmin_k << ")\n";
    if (!out.empty())
        write_file(out, j.dump());
    else
        std::cout << j.dump() << "\n";
    return kExitOk;
}

int run_simulate(const std::string& policy_path, long long trials,
                 std::uint64_t seed, int threads, const std::string& utility,
                 int k, double delta, const std::string& out) {
    const std::string text = read_file(policy_path);
    nlohmann::json j = nlohmann::json::parse(text);
    spua::SimReport report;
    if (j.contains("offer_if_available")) {
        spua::AvailabilityPolicy table = spua::availability_policy_from_json(text);
        spua::SimConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.policy = spua::PolicyTable(table.n, table.p);  // carries (n, p)
        if (!utility.empty())
            cfg.utility = make_utility(utility, table.n, k, delta);
        report = spua::simulate_availability_policy(cfg, table);
    } else {
        spua::SimConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.policy = spua::policy_from_json(text);
        if (!utility.empty())
            cfg.utility = make_utility(utility, cfg.policy.n, k, delta);
        report = spua::simulate(cfg);
    }
    const std::string payload = spua::sim_report_to_json(report);
    if (!out.empty())
        write_file(out, payload);
    else
        std::cout << payload << "\n";
    return kExitOk;
}

int run_bounds(const GridFlags& grid_flags, int ref_n, const std::string& out,
               int threads, const std::string& method) {
    const std::vector<double> grid = parse_grid(grid_flags);
    const int count = static_cast<int>(grid.size());
    std::vector<std::string> rows(count);

    parallel_rows(count, threads, [&](int i) {
        const double p = grid[i];
        std::ostringstream row;
        try {
            const double upper = spua::upper_bound(p);
            const double lower = spua::lower_bound(p);
            std::string gamma_text;
            if (ref_n > 0) {
                spua::SolveOptions opts;
                opts.method = parse_method(method);
                spua::LpSolution sol =
                    spua::solve_lp(spua::build_finite_lp(ref_n, p), opts);
                if (sol.status != spua::LpStatus::optimal)
                    throw std::runtime_error("solver failure");
                gamma_text = fmt12(sol.gamma);
            }
            row << fmt12(p) << "," << fmt12(upper) << "," << fmt12(lower) << ","
                << gamma_text << ",ok";
        } catch (const std::exception& e) {
            row << fmt12(p) << ",,,," << "error: " << e.what();
        }
        rows[i] = row.str();
    });

    std::ostringstream csv;
    csv << "p,upper,lower,gamma_n,status\n";
    for (const auto& r : rows) csv << r << "\n";
    if (!out.empty())
        write_file(out, csv.str());
    else
        std::cout << csv.str();
    return kExitOk;
}

int run_experiment(int n, const GridFlags& grid_flags,
                   const std::string& utility, int k, double delta,
                   std::uint64_t seed, long long trials, const std::string& out,
                   int threads) {
    const std::vector<double> grid = parse_grid(grid_flags);
    const int count = static_cast<int>(grid.size());
    const spua::UtilityVector u = make_utility(utility, n, k, delta);
    std::vector<std::array<std::string, 3>> rows(count);

    parallel_rows(count, threads, [&](int i) {
        const double p = grid[i];
        auto fail = [&](const std::string& msg) {
            rows[i][0] = fmt12(p) + ",rob_pol,,,error: " + msg;
            rows[i][1] = fmt12(p) + ",util_pol,,,error: " + msg;
            rows[i][2] = fmt12(p) + ",tama_pol,,,error: " + msg;
        };
        try {
            const double opt = spua::opt_offline_utility(n, p, u);

            spua::LpSolution sol = spua::solve_lp(spua::build_finite_lp(n, p));
            if (sol.status != spua::LpStatus::optimal)
                throw std::runtime_error("solver failure");
            spua::PolicyTable rob = spua::robust_policy_from_lp(sol, n, p);
            const double rob_ratio = spua::expected_utility(rob, u) / opt;

            spua::UtilPolResult up = spua::util_pol(n, p, u);
            const double util_ratio = spua::expected_utility(up.policy, u) / opt;

            spua::AvailabilityPolicy tam = spua::tamaki_model2(n, p);
            spua::SimConfig cfg;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.threads = 1;
            cfg.policy = spua::PolicyTable(n, p);
            cfg.utility = u;
            spua::SimReport sim = spua::simulate_availability_policy(cfg, tam);

            rows[i][0] =
                fmt12(p) + ",rob_pol," + fmt12(rob_ratio) + ",0,ok";
            rows[i][1] =
                fmt12(p) + ",util_pol," + fmt12(util_ratio) + ",0,ok";
            rows[i][2] = fmt12(p) + ",tama_pol," +
                         fmt12(sim.utility_mean / opt) + "," +
                         fmt12(sim.utility_stderr / opt) + ",ok";
        } catch (const std::exception& e) {
            fail(e.what());
        }
    });

    std::ostringstream csv;
    csv << "p,policy,ratio,stderr,status\n";
    for (const auto& r : rows)
        for (const auto& line : r) csv << line << "\n";
    if (!out.empty())
        write_file(out, csv.str());
    else
        std::cout << csv.str();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Robust policies for the secretary problem with uncertain acceptance"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand(
        "solve", "Solve the robust-ratio LP and write the optimal policy");
    int n = 0, cap = 0;
    double p = 0.0;
    bool full = false;
    std::string out, export_lp, method = "auto";
    solve->add_option("--n", n, "candidate count")->required();
    solve->add_option("--p", p, "acceptance probability in (0,1]")->required();
    solve->add_option("--cap", cap, "robust-constraint cap q (default ceil(log n / p))");
    solve->add_flag("--full", full, "solve the uncapped LP");
    solve->add_option("--out", out, "policy JSON output path");
    solve->add_option("--export-lp", export_lp, "write the model in LP text format");
    solve->add_option("--method", method, "auto|simplex|colgen");

    // eval
    auto* eval = app.add_subcommand("eval", "Exact evaluation of a policy file");
    std::string eval_policy, eval_utility, eval_out;
    int eval_n = 0, eval_k = 1;
    double eval_p = 0.0, eval_delta = 0.1;
    eval->add_option("--policy", eval_policy, "policy JSON path")->required();
    eval->add_option("--n", eval_n, "expected candidate count");
    eval->add_option("--p", eval_p, "expected acceptance probability");
    eval->add_option("--utility", eval_utility, "topk|powerlaw");
    eval->add_option("--k", eval_k, "top-k utility parameter");
    eval->add_option("--delta", eval_delta, "power-law utility parameter");
    eval->add_option("--out", eval_out, "report JSON output path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Seeded Monte Carlo of a policy file");
    std::string sim_policy, sim_utility, sim_out;
    long long sim_trials = 100000;
    std::uint64_t sim_seed = 1;
    int sim_threads = 0, sim_k = 1;
    double sim_delta = 0.1;
    sim->add_option("--policy", sim_policy, "policy JSON path (offer table or availability table)")
        ->required();
    sim->add_option("--trials", sim_trials, "number of trials")->required();
    sim->add_option("--seed", sim_seed, "64-bit seed")->required();
    sim->add_option("--threads", sim_threads, "worker threads (default SPUA_THREADS or 1)");
    sim->add_option("--utility", sim_utility, "topk|powerlaw");
    sim->add_option("--k", sim_k, "top-k utility parameter");
    sim->add_option("--delta", sim_delta, "power-law utility parameter");
    sim->add_option("--out", sim_out, "report JSON output path");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Bounds curve CSV over a p grid");
    GridFlags bounds_grid;
    int ref_n = 0, bounds_threads = 0;
    std::string bounds_out, bounds_method = "auto";
    bounds->add_option("--p-list", bounds_grid.list, "comma-separated p grid");
    bounds->add_option("--p-min", bounds_grid.pmin, "grid start");
    bounds->add_option("--p-max", bounds_grid.pmax, "grid end");
    bounds->add_option("--p-step", bounds_grid.step, "grid step");
    bounds->add_option("--ref-n", ref_n, "also solve gamma*_n at this n");
    bounds->add_option("--out", bounds_out, "CSV output path");
    bounds->add_option("--threads", bounds_threads, "worker threads");
    bounds->add_option("--method", bounds_method, "auto|simplex|colgen");

    // experiment
    auto* exp = app.add_subcommand(
        "experiment", "Utility-ratio comparison of rob/util/tamaki policies");
    GridFlags exp_grid;
    int exp_n = 30, exp_k = 1, exp_threads = 0;
    double exp_delta = 0.1;
    std::string exp_utility, exp_out;
    std::uint64_t exp_seed = 1;
    long long exp_trials = 200000;
    exp->add_option("--n", exp_n, "candidate count (default 30)");
    exp->add_option("--utility", exp_utility, "topk|powerlaw")->required();
    exp->add_option("--k", exp_k, "top-k utility parameter");
    exp->add_option("--delta", exp_delta, "power-law utility parameter");
    exp->add_option("--p-list", exp_grid.list, "comma-separated p grid");
    exp->add_option("--p-min", exp_grid.pmin, "grid start");
    exp->add_option("--p-max", exp_grid.pmax, "grid end");
    exp->add_option("--p-step", exp_grid.step, "grid step");
    exp->add_option("--seed", exp_seed, "seed for the Tamaki Monte Carlo");
    exp->add_option("--trials", exp_trials, "Monte Carlo trials per row");
    exp->add_option("--out", exp_out, "CSV output path");
    exp->add_option("--threads", exp_threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (solve->parsed())
            return run_solve(n, p, cap, full, out, export_lp, method);
        if (eval->parsed())
            return run_eval(eval_policy, eval_n, eval_p, eval_utility, eval_k,
                            eval_delta, eval_out);
        if (sim->parsed())
            return run_simulate(sim_policy, sim_trials, sim_seed, sim_threads,
                                sim_utility, sim_k, sim_delta, sim_out);
        if (bounds->parsed())
            return run_bounds(bounds_grid, ref_n,
                              bounds_out,
                              spua::resolve_thread_count(bounds_threads),
                              bounds_method);
        if (exp->parsed())
            return run_experiment(exp_n, exp_grid, exp_utility, exp_k,
                                  exp_delta, exp_seed, exp_trials, exp_out,
                                  spua::resolve_thread_count(exp_threads));
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitInput;
}
