#include <doctest.h>

#include <json.hpp>

#include "oracle_helpers.hpp"
#include "spua/evaluation.hpp"
#include "spua/lp_core.hpp"
#include "spua/montecarlo.hpp"
#include "spua/numerics.hpp"

using namespace spua;

namespace {
PolicyTable offer_first_only(int n, double p) {
    PolicyTable policy(n, p);
    policy.q(1, 1) = 1.0;
    return policy;
}
}  // namespace

TEST_CASE("collect probabilities of the offer-first policy") {
    const int n = 10;
    const double p = 0.3;
    PolicyTable pol = offer_first_only(n, p);
    for (int k = 1; k <= n; ++k)
        CHECK(collect_topk_prob(pol, k) ==
              doctest::Approx(p * k / n).epsilon(1e-12));
    for (int i = 1; i <= n; ++i)
        CHECK(collect_rank_prob(pol, i) ==
              doctest::Approx(p / n).epsilon(1e-12));
    EvaluationReport rep = robust_ratio(pol);
    CHECK(rep.gamma == doctest::Approx(1.0 / n).epsilon(1e-10));
    CHECK(rep.argmin_k == 1);
}

TEST_CASE("degenerate policies") {
    PolicyTable zero(6, 0.5);
    for (int k = 1; k <= 6; ++k) CHECK(collect_topk_prob(zero, k) == 0.0);
    CHECK(robust_ratio(zero).gamma == 0.0);
    CHECK_THROWS_AS(collect_topk_prob(zero, 7), std::domain_error);
    CHECK_THROWS_AS(collect_rank_prob(zero, 0), std::domain_error);
}

TEST_CASE("single candidate") {
    PolicyTable pol = offer_first_only(1, 0.45);
    CHECK(collect_topk_prob(pol, 1) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(robust_ratio(pol).gamma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank distribution is consistent with topk sums") {
    PolicyTable pol = testing::random_policy(9, 0.4, 2024);
    Eigen::VectorXd dist = collect_rank_distribution(pol);
    double acc = 0.0;
    for (int k = 1; k <= 9; ++k) {
        acc += dist[k - 1];
        CHECK(collect_topk_prob(pol, k) == doctest::Approx(acc).epsilon(1e-12));
        CHECK(collect_rank_prob(pol, k) ==
              doctest::Approx(dist[k - 1]).epsilon(1e-12));
    }
}

TEST_CASE("LP policy reproduces the optimum") {
    LpSolution sol = solve_lp(build_finite_lp(5, 1.0));
    PolicyTable pol = robust_policy_from_lp(sol, 5, 1.0);
    EvaluationReport rep = robust_ratio(pol);
    CHECK(rep.gamma == doctest::Approx(sol.gamma).epsilon(1e-8));
    CHECK(rep.gamma == doctest::Approx(13.0 / 30.0).epsilon(1e-8));
}

TEST_CASE("expected utility identities") {
    const int n = 8;
    const double p = 0.35;
    PolicyTable pol = testing::random_policy(n, p, 555);
    // indicator utilities reproduce collect probabilities
    for (int k = 1; k <= n; ++k) {
        Eigen::VectorXd ind = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < k; ++i) ind[i] = 1.0;
        CHECK(expected_utility(pol, UtilityVector(ind)) ==
              doctest::Approx(collect_topk_prob(pol, k)).epsilon(1e-12));
    }
    // always offering with constant utility collects 1-(1-p)^n
    PolicyTable always(n, p);
    for (double& q : always.q.flat()) q = 1.0;
    UtilityVector ones{Eigen::VectorXd::Ones(n)};
    CHECK(expected_utility(always, ones) ==
          doctest::Approx(1.0 - std::pow(1.0 - p, n)).epsilon(1e-12));
    // top-1 utility of the optimal policy at p = 1 is the classical value
    LpSolution sol = solve_lp(build_finite_lp(5, 1.0));
    PolicyTable lp_policy = robust_policy_from_lp(sol, 5, 1.0);
    UtilityVector top1{Eigen::VectorXd::Unit(5, 0)};
    CHECK(expected_utility(lp_policy, top1) ==
          doctest::Approx(13.0 / 30.0).epsilon(1e-8));
}

TEST_CASE("offline optimum closed form") {
    {
        UtilityVector u{Eigen::VectorXd::Unit(4, 0)};
        CHECK(opt_offline_utility(4, 0.3, u) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }
    {
        UtilityVector u{Eigen::VectorXd::Ones(6)};
        CHECK(opt_offline_utility(6, 0.25, u) ==
              doctest::Approx(1.0 - std::pow(0.75, 6)).epsilon(1e-12));
    }
    {
        Eigen::VectorXd v(3);
        v << 1.0, 0.5, 0.25;
        CHECK(opt_offline_utility(3, 0.5, UtilityVector(v)) ==
              doctest::Approx(0.65625).epsilon(1e-12));
        // Monte Carlo of the offline optimum itself
        SubstreamRng rng(5150, 0);
        double acc = 0.0;
        const int trials = 400000;
        for (int trial = 0; trial < trials; ++trial) {
            for (int i = 0; i < 3; ++i)
                if (rng.next_unit() < 0.5) {
                    acc += v[i];
                    break;
                }
        }
        const double mc = acc / trials;
        CHECK(std::abs(mc - 0.65625) <= 4.0 * std::sqrt(0.25 / trials) + 1e-9);
    }
}

TEST_CASE("robust utility guarantee and dominance at n = 30") {
    const int n = 30;
    for (double p : {0.2, 0.8}) {
        LpSolution sol = solve_lp(build_finite_lp(n, p));
        PolicyTable rob = robust_policy_from_lp(sol, n, p);
        std::vector<Eigen::VectorXd> utilities;
        for (int k = 1; k <= 4; ++k) {
            Eigen::VectorXd u(n);
            double pw = 1.0;
            for (int i = 1; i <= n; ++i) {
                pw /= n;
                u[i - 1] = (i <= k ? 1.0 : 0.0) + pw;
            }
            utilities.push_back(u);
        }
        for (double delta : {0.01, 0.1, 0.2}) {
            Eigen::VectorXd u(n);
            for (int i = 1; i <= n; ++i)
                u[i - 1] = std::pow(i, -1.0 / (1.0 + delta));
            utilities.push_back(u);
        }
        for (const auto& raw : utilities) {
            UtilityVector u(raw);
            const double opt = opt_offline_utility(n, p, u);
            const double rob_val = expected_utility(rob, u);
            CHECK(rob_val >= sol.gamma * opt - 1e-8);
            UtilPolResult up = util_pol(n, p, u);
            CHECK(up.value >= rob_val - 1e-8);
            // availability-aware benchmark evaluated by its exact forward pass
            const double tam_val =
                availability_expected_utility(tamaki_model2(n, p), u);
            CHECK(up.value >= tam_val - 1e-8);
        }
    }
}

TEST_CASE("ratio floor 1/e at moderate n") {
    const int n = 25;
    for (double p : {0.1, 0.5, 0.9}) {
        LpSolution sol = solve_lp(build_finite_lp(n, p));
        PolicyTable rob = robust_policy_from_lp(sol, n, p);
        CHECK(robust_ratio(rob).gamma >= std::exp(-1.0) - 1e-6);
    }
}

TEST_CASE("stable acceptance weight for tiny p") {
    CHECK(accept_any_topk_prob(1e-9, 1) == doctest::Approx(1e-9).epsilon(1e-12));
    CHECK(accept_any_topk_prob(0.01, 2) ==
          doctest::Approx(1.0 - 0.99 * 0.99).epsilon(1e-13));
    CHECK(accept_any_topk_prob(1.0, 5) == 1.0);
}

TEST_CASE("report JSON schema") {
    PolicyTable pol = offer_first_only(4, 0.5);
    EvaluationReport rep = robust_ratio(pol);
    auto j = nlohmann::json::parse(report_to_json(rep));
    CHECK(j.contains("gamma"));
    CHECK(j.contains("argmin_k"));
    CHECK(j.at("ratios").size() == 4);
    CHECK(j.at("collect").size() == 4);
    CHECK(j.at("gamma").get<double>() == doctest::Approx(0.25).epsilon(1e-10));
}
