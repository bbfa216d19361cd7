#include "spua/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "spua/numerics.hpp"

namespace spua {

ThresholdFamily::ThresholdFamily(std::vector<double> t) : times(std::move(t)) {
    double prev = 0.0;
    for (double v : times) {
        if (!(v > 0.0) || v > 1.0)
            throw std::invalid_argument(
                "ThresholdFamily: fractions must lie in (0, 1]");
        if (v < prev)
            throw std::invalid_argument(
                "ThresholdFamily: fractions must be nondecreasing");
        prev = v;
    }
}

UtilityVector::UtilityVector(Eigen::VectorXd v) : values(std::move(v)) {
    if (values.size() == 0)
        throw std::invalid_argument("UtilityVector: empty vector");
    double prev = std::numeric_limits<double>::infinity();
    bool nonzero = false;
    for (int i = 0; i < values.size(); ++i) {
        double u = values[i];
        if (!(u >= 0.0))
            throw std::invalid_argument("UtilityVector: entries must be >= 0");
        if (u > prev + 1e-12)
            throw std::invalid_argument("UtilityVector: entries must be nonincreasing");
        if (u > 0.0) nonzero = true;
        prev = u;
    }
    if (!nonzero)
        throw std::invalid_argument("UtilityVector: must not be identically zero");
}

double threshold_fraction(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("threshold_fraction: p must be in (0, 1]");
    if (p >= 1.0 - 1e-12) return std::exp(-1.0);
    return std::pow(p, 1.0 / (1.0 - p));
}

double power_ratio(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("power_ratio: p must be in (0, 1]");
    if (p >= 1.0 - 1e-12) return std::exp(-1.0);
    return std::pow(p, p / (1.0 - p));
}

int threshold_cutoff_stage(double tau, int n) {
    int cutoff = static_cast<int>(std::ceil(tau * n - 1e-12));
    return std::clamp(cutoff, 0, n);
}

PolicyTable robust_policy_from_lp(const LpSolution& sol, int n, double p) {
    if (sol.x.stages() != n)
        throw std::invalid_argument("robust_policy_from_lp: solution size != n");
    PolicyTable policy(n, p);
    double reach = 1.0;  // 1 - p * sum over earlier stages of x*
    double worst_clamp = 0.0;
    for (int t = 1; t <= n; ++t) {
        double stage = 0.0;
        for (int s = 1; s <= t; ++s) {
            const double xv = sol.x(t, s);
            stage += xv;
            if (reach <= 1e-12) {
                policy.q(t, s) = 0.0;  // unreachable stage
                continue;
            }
            double q = t * xv / reach;
            worst_clamp = std::max({worst_clamp, -q, q - 1.0});
            policy.q(t, s) = std::min(1.0, std::max(0.0, q));
        }
        reach -= p * stage;
    }
    if (worst_clamp > 1e-7)
        throw std::invalid_argument(
            "robust_policy_from_lp: offer probability clamped by " +
            std::to_string(worst_clamp) + "; solution violates the polytope");
    return policy;
}

PolicyTable single_threshold_policy(int n, double p) {
    PolicyTable policy(n, p);
    const int cutoff = threshold_cutoff_stage(threshold_fraction(p), n);
    for (int t = cutoff + 1; t <= n; ++t) policy.q(t, 1) = 1.0;
    return policy;
}

PolicyTable multi_threshold_policy(int n, double p,
                                   const ThresholdFamily& fam) {
    PolicyTable policy(n, p);
    for (int s = 1; s <= n; ++s) {
        const int cutoff = threshold_cutoff_stage(fam.at(s), n);
        for (int t = std::max(s, cutoff + 1); t <= n; ++t) policy.q(t, s) = 1.0;
    }
    return policy;
}

UtilPolResult util_pol(int n, double p, const UtilityVector& utility) {
    if (utility.n() != n)
        throw std::invalid_argument("util_pol: utility size != n");
    RankKernel kernel(n);
    BackwardDpResult dp =
        rank_utility_dp(kernel, p, utility.values, /*offer_on_tie=*/true);
    UtilPolResult res{PolicyTable(n, p), dp.value};
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s)
            res.policy.q(t, s) = dp.offer(t, s) ? 1.0 : 0.0;
    return res;
}

Triangular<double> tamaki_win_table(int n, double p) {
    // W(t,s): an offer to a contender at (t,s) wins iff every better-ranked
    // candidate still to come is unavailable; the s-1 better-ranked
    // predecessors are unavailable by the contender condition.
    RankKernel kernel(n);
    Triangular<double> win(n, 0.0);
    std::vector<double> row(n);
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s) {
            kernel.point_row(t, s, row.data());
            double g = 0.0;
            double unavailable = 1.0;  // (1-p)^{i-s}
            for (int i = s; i <= n - t + s; ++i) {
                g += row[i - 1] * unavailable;
                unavailable *= 1.0 - p;
            }
            win(t, s) = g;
        }
    return win;
}

AvailabilityPolicy tamaki_model2(int n, double p) {
    if (n < 1) throw std::domain_error("tamaki_model2: n must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("tamaki_model2: p must be in (0, 1]");

    AvailabilityPolicy pol;
    pol.n = n;
    pol.p = p;
    pol.offer_if_available = Triangular<uint8_t>(n, 0);

    const Triangular<double> win = tamaki_win_table(n, p);

    // V(t, b): optimal success probability with t candidates processed and
    // the best available one so far holding relative rank b among them
    // (b = t+1 encodes "none available yet").  A new arrival of partial rank
    // sigma is a contender when it is available and beats the shifted b;
    // only contenders are worth an offer, and an offer ends the process.
    // Passing a contender makes it the new best available, so the offer
    // rule compares win(t, s) against V(t, s).
    std::vector<std::vector<double>> value(n + 1);
    value[n].assign(n + 2, 0.0);
    for (int t = n - 1; t >= 0; --t) {
        value[t].assign(t + 2, 0.0);
        for (int b = 1; b <= t + 1; ++b) {
            double acc = 0.0;
            for (int sigma = 1; sigma <= t + 1; ++sigma) {
                const int bshift = sigma <= b ? b + 1 : b;  // old best's rank
                                                            // within t+1
                const double pass = value[t + 1][bshift];
                const double if_avail =
                    sigma < bshift ? std::max(win(t + 1, sigma),
                                              value[t + 1][sigma])
                                   : pass;
                acc += p * if_avail + (1.0 - p) * pass;
            }
            value[t][b] = acc / (t + 1);
        }
    }
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s)
            pol.offer_if_available(t, s) = win(t, s) >= value[t][s] ? 1 : 0;
    pol.value = value[0][1];
    return pol;
}

std::string availability_policy_to_json(const AvailabilityPolicy& pol) {
    nlohmann::json j;
    j["n"] = pol.n;
    j["p"] = pol.p;
    auto rows = nlohmann::json::array();
    for (int t = 1; t <= pol.n; ++t) {
        auto row = nlohmann::json::array();
        for (int s = 1; s <= t; ++s)
            row.push_back(static_cast<bool>(pol.offer_if_available(t, s)));
        rows.push_back(std::move(row));
    }
    j["offer_if_available"] = std::move(rows);
    return j.dump();
}

AvailabilityPolicy availability_policy_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("n") || !j.contains("p") ||
        !j.contains("offer_if_available"))
        throw std::invalid_argument(
            "availability policy JSON: expected {n, p, offer_if_available}");
    AvailabilityPolicy pol;
    pol.n = j.at("n").get<int>();
    pol.p = j.at("p").get<double>();
    if (pol.n < 1 || !(pol.p > 0.0) || pol.p > 1.0)
        throw std::invalid_argument("availability policy JSON: bad n or p");
    pol.offer_if_available = Triangular<uint8_t>(pol.n, 0);
    const auto& rows = j.at("offer_if_available");
    if (!rows.is_array() || static_cast<int>(rows.size()) != pol.n)
        throw std::invalid_argument(
            "availability policy JSON: offer_if_available must have n rows");
    for (int t = 1; t <= pol.n; ++t) {
        const auto& row = rows[t - 1];
        if (!row.is_array() || static_cast<int>(row.size()) != t)
            throw std::invalid_argument(
                "availability policy JSON: row " + std::to_string(t - 1) +
                " must have " + std::to_string(t) + " entries");
        for (int s = 1; s <= t; ++s)
            pol.offer_if_available(t, s) = row[s - 1].get<bool>() ? 1 : 0;
    }
    return pol;
}

}  // namespace spua
