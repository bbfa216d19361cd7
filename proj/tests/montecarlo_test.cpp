#include <doctest.h>

#include <json.hpp>

#include "oracle_helpers.hpp"
#include "spua/evaluation.hpp"
#include "spua/lp_core.hpp"
#include "spua/montecarlo.hpp"
#include "spua/numerics.hpp"
#include "spua/policies.hpp"

using namespace spua;

TEST_CASE("identical seeds give identical reports, any thread count") {
    SimConfig cfg;
    cfg.trials = 150000;
    cfg.seed = 0xC0FFEE;
    cfg.policy = testing::random_policy(8, 0.4, 9);
    cfg.utility = UtilityVector{testing::random_nonincreasing_utility(8, 9)};
    cfg.threads = 1;
    const std::string a = sim_report_to_json(simulate(cfg));
    const std::string b = sim_report_to_json(simulate(cfg));
    CHECK(a == b);
    cfg.threads = 3;
    const std::string c = sim_report_to_json(simulate(cfg));
    CHECK(a == c);
    SimConfig other = cfg;
    other.seed = 0xC0FFEF;
    CHECK(sim_report_to_json(simulate(other)) != a);
}

TEST_CASE("never offering never collects") {
    SimConfig cfg;
    cfg.trials = 20000;
    cfg.seed = 7;
    cfg.policy = PolicyTable(6, 0.5);
    SimReport rep = simulate(cfg);
    CHECK(rep.accept_count == 0);
    for (int k = 1; k <= 6; ++k) CHECK(rep.collect_freq[k - 1] == 0.0);
}

TEST_CASE("single bernoulli candidate") {
    SimConfig cfg;
    cfg.trials = 1000000;
    cfg.seed = 123;
    cfg.policy = PolicyTable(1, 0.5);
    cfg.policy.q(1, 1) = 1.0;
    SimReport rep = simulate(cfg);
    CHECK(std::abs(rep.collect_freq[0] - 0.5) <= 4.0 * 0.0005);
}

TEST_CASE("offer-first frequency matches p/n") {
    SimConfig cfg;
    cfg.trials = 400000;
    cfg.seed = 99;
    cfg.policy = PolicyTable(10, 0.3);
    cfg.policy.q(1, 1) = 1.0;
    SimReport rep = simulate(cfg);
    CHECK(std::abs(rep.collect_freq[0] - 0.03) <=
          4.0 * rep.collect_stderr[0] + 1e-9);
}

TEST_CASE("simulated collect curves agree with exact evaluation") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        SimConfig cfg;
        cfg.trials = 200000;
        cfg.seed = seed * 1000003;
        cfg.policy = testing::random_policy(8, 0.45, seed);
        SimReport rep = simulate(cfg);
        EvaluationReport exact = robust_ratio(cfg.policy);
        for (int k = 1; k <= 8; ++k) {
            const double se = std::max(rep.collect_stderr[k - 1], 1e-7);
            CHECK(std::abs(rep.collect_freq[k - 1] - exact.collect[k - 1]) <=
                  4.0 * se);
        }
    }
}

TEST_CASE("partial ranks are uniform (chi-square)") {
    const int n = 8;
    const long long trials = 300000;
    std::vector<std::vector<long long>> counts(n + 1);
    for (int t = 1; t <= n; ++t) counts[t].assign(t + 1, 0);
    std::vector<int> ranks(n);
    for (long long trial = 0; trial < trials; ++trial) {
        SubstreamRng rng(31415, trial);
        draw_permutation(rng, ranks);
        for (int t = 1; t <= n; ++t) {
            int s = 1;
            for (int tau = 1; tau < t; ++tau)
                if (ranks[tau - 1] < ranks[t - 1]) ++s;
            ++counts[t][s];
        }
    }
    for (int t = 2; t <= n; ++t) {
        const double expected = static_cast<double>(trials) / t;
        double chi2 = 0.0;
        for (int s = 1; s <= t; ++s) {
            const double d = counts[t][s] - expected;
            chi2 += d * d / expected;
        }
        CHECK(chi2 <= chi_square_quantile(t - 1, 1.0 - 1e-4));
    }
}

TEST_CASE("availability simulation: single candidate and p = 1 reduction") {
    {
        AvailabilityPolicy pol = tamaki_model2(1, 0.3);
        SimConfig cfg;
        cfg.trials = 400000;
        cfg.seed = 5;
        cfg.policy = PolicyTable(pol.n, pol.p);
        SimReport rep = simulate_availability_policy(cfg, pol);
        CHECK(std::abs(rep.success_freq - 0.3) <=
              4.0 * rep.success_stderr + 1e-9);
    }
    {
        AvailabilityPolicy pol = tamaki_model2(5, 1.0);
        SimConfig cfg;
        cfg.trials = 400000;
        cfg.seed = 6;
        cfg.policy = PolicyTable(pol.n, pol.p);
        SimReport rep = simulate_availability_policy(cfg, pol);
        CHECK(std::abs(rep.collect_freq[0] - 13.0 / 30.0) <=
              4.0 * rep.collect_stderr[0] + 1e-9);
        CHECK(std::abs(rep.success_freq - 13.0 / 30.0) <=
              4.0 * rep.success_stderr + 1e-9);
    }
}

TEST_CASE("availability simulation matches the n = 2 enumeration and the DP") {
    AvailabilityPolicy pol = tamaki_model2(2, 0.5);
    const double exact = testing::tamaki_value_n2_bruteforce(0.5);
    CHECK(pol.value == doctest::Approx(exact).epsilon(1e-12));
    SimConfig cfg;
    cfg.trials = 400000;
    cfg.seed = 777;
    cfg.policy = PolicyTable(pol.n, pol.p);
    SimReport rep = simulate_availability_policy(cfg, pol);
    CHECK(std::abs(rep.success_freq - exact) <= 4.0 * rep.success_stderr + 1e-9);
}

TEST_CASE("availability utility and ranks match the exact forward pass") {
    const int n = 9;
    const double p = 0.4;
    AvailabilityPolicy pol = tamaki_model2(n, p);
    UtilityVector u{testing::random_nonincreasing_utility(n, 4242)};
    SimConfig cfg;
    cfg.trials = 300000;
    cfg.seed = 904;
    cfg.policy = PolicyTable(n, p);
    cfg.utility = u;
    SimReport rep = simulate_availability_policy(cfg, pol);
    const double exact = availability_expected_utility(pol, u);
    CHECK(std::abs(rep.utility_mean - exact) <=
          4.0 * rep.utility_stderr + 1e-9);
    CHECK(std::abs(rep.success_freq - pol.value) <=
          4.0 * rep.success_stderr + 1e-9);
    Eigen::VectorXd dist = availability_collect_rank_distribution(pol);
    double acc = 0.0;
    for (int k = 1; k <= n; ++k) {
        acc += dist[k - 1];
        const double se = std::max(rep.collect_stderr[k - 1], 1e-7);
        CHECK(std::abs(rep.collect_freq[k - 1] - acc) <= 4.0 * se);
    }
}

TEST_CASE("sim report JSON carries seed, trials and stderr arrays") {
    SimConfig cfg;
    cfg.trials = 1000;
    cfg.seed = 42;
    cfg.policy = testing::random_policy(4, 0.5, 1);
    auto j = nlohmann::json::parse(sim_report_to_json(simulate(cfg)));
    CHECK(j.at("seed").get<std::uint64_t>() == 42);
    CHECK(j.at("trials").get<long long>() == 1000);
    CHECK(j.at("collect").size() == 4);
    CHECK(j.at("stderr").size() == 4);
    CHECK(j.contains("accept_count"));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.trials = 0;
    cfg.policy = PolicyTable(3, 0.5);
    CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
    cfg.trials = 10;
    cfg.utility = UtilityVector{Eigen::VectorXd::Ones(2)};
    CHECK_THROWS_AS(simulate(cfg), std::invalid_argument);
}
