#include "spua/evaluation.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "spua/numerics.hpp"
#include "spua/rank_stats.hpp"

namespace spua {

Eigen::VectorXd collect_rank_distribution(const PolicyTable& policy) {
    policy.validate();
    const int n = policy.n;
    const OccupancyMeasure occ = policy_to_occupancy(policy);
    RankKernel kernel(n);
    Eigen::VectorXd per_rank = Eigen::VectorXd::Zero(n);
    std::vector<double> row(n);
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s) {
            const double xv = occ.x(t, s);
            if (xv == 0.0) continue;
            kernel.point_row(t, s, row.data());
            for (int i = s - 1; i <= n - t + s - 1; ++i)
                per_rank[i] += xv * row[i];
        }
    return policy.p * per_rank;
}

double collect_topk_prob(const PolicyTable& policy, int k) {
    policy.validate();
    if (k < 1 || k > policy.n)
        throw std::domain_error("collect_topk_prob: k outside [1, n]");
    const OccupancyMeasure occ = policy_to_occupancy(policy);
    RankKernel kernel(policy.n);
    double sum = 0.0;
    for (int t = 1; t <= policy.n; ++t)
        for (int s = 1; s <= std::min(t, k); ++s) {
            const double xv = occ.x(t, s);
            if (xv != 0.0) sum += xv * kernel.topk(t, s, k);
        }
    return policy.p * sum;
}

double collect_rank_prob(const PolicyTable& policy, int i) {
    policy.validate();
    if (i < 1 || i > policy.n)
        throw std::domain_error("collect_rank_prob: i outside [1, n]");
    const OccupancyMeasure occ = policy_to_occupancy(policy);
    RankKernel kernel(policy.n);
    double sum = 0.0;
    for (int t = 1; t <= policy.n; ++t)
        for (int s = 1; s <= t; ++s) {
            const double xv = occ.x(t, s);
            if (xv != 0.0) sum += xv * kernel.point(t, s, i);
        }
    return policy.p * sum;
}

EvaluationReport robust_ratio(const PolicyTable& policy) {
    EvaluationReport report;
    report.n = policy.n;
    report.p = policy.p;
    const Eigen::VectorXd per_rank = collect_rank_distribution(policy);
    report.collect.resize(policy.n);
    report.ratios.resize(policy.n);
    double acc = 0.0;
    for (int k = 1; k <= policy.n; ++k) {
        acc += per_rank[k - 1];
        report.collect[k - 1] = acc;
        report.ratios[k - 1] = acc / accept_any_topk_prob(policy.p, k);
    }
    report.gamma = report.ratios[0];
    report.argmin_k = 1;
    for (int k = 2; k <= policy.n; ++k)
        if (report.ratios[k - 1] < report.gamma) {
            report.gamma = report.ratios[k - 1];
            report.argmin_k = k;
        }
    return report;
}

double expected_utility(const PolicyTable& policy, const UtilityVector& u) {
    if (u.n() != policy.n)
        throw std::invalid_argument("expected_utility: utility size != n");
    return collect_rank_distribution(policy).dot(u.values);
}

double opt_offline_utility(int n, double p, const UtilityVector& u) {
    if (u.n() != n)
        throw std::invalid_argument("opt_offline_utility: utility size != n");
    if (!(p > 0.0) || p > 1.0)
        throw std::domain_error("opt_offline_utility: p must be in (0, 1]");
    double sum = 0.0;
    double weight = p;  // p (1-p)^{i-1}
    for (int i = 1; i <= n; ++i) {
        sum += u.values[i - 1] * weight;
        weight *= 1.0 - p;
    }
    return sum;
}

Eigen::VectorXd availability_collect_rank_distribution(
    const AvailabilityPolicy& pol) {
    const int n = pol.n;
    RankKernel kernel(n);
    Eigen::VectorXd dist = Eigen::VectorXd::Zero(n);
    // reach[b] = Prob(t candidates processed, best available at rank b);
    // b = t+1 encodes "none available yet".
    std::vector<double> reach(n + 2, 0.0), next(n + 2, 0.0);
    reach[1] = 1.0;
    std::vector<double> row(n);
    for (int t = 0; t < n; ++t) {
        std::fill(next.begin(), next.end(), 0.0);
        std::vector<double> offer_mass(t + 2, 0.0);
        for (int b = 1; b <= t + 1; ++b) {
            const double m = reach[b];
            if (m == 0.0) continue;
            const double share = m / (t + 1);
            for (int sigma = 1; sigma <= t + 1; ++sigma) {
                const int bshift = sigma <= b ? b + 1 : b;
                next[bshift] += share * (1.0 - pol.p);
                if (sigma < bshift && pol.offer_if_available(t + 1, sigma)) {
                    offer_mass[sigma] += share * pol.p;
                } else if (sigma < bshift) {
                    next[sigma] += share * pol.p;  // contender passed
                } else {
                    next[bshift] += share * pol.p;
                }
            }
        }
        for (int sigma = 1; sigma <= t + 1; ++sigma) {
            if (offer_mass[sigma] == 0.0) continue;
            kernel.point_row(t + 1, sigma, row.data());
            for (int i = sigma - 1; i <= n - (t + 1) + sigma - 1; ++i)
                dist[i] += offer_mass[sigma] * row[i];
        }
        reach.swap(next);
    }
    return dist;
}

double availability_expected_utility(const AvailabilityPolicy& pol,
                                     const UtilityVector& u) {
    if (u.n() != pol.n)
        throw std::invalid_argument(
            "availability_expected_utility: utility size != n");
    return availability_collect_rank_distribution(pol).dot(u.values);
}

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::json j;
    j["gamma"] = report.gamma;
    j["argmin_k"] = report.argmin_k;
    j["ratios"] = std::vector<double>(report.ratios.begin(), report.ratios.end());
    j["collect"] =
        std::vector<double>(report.collect.begin(), report.collect.end());
    return j.dump();
}

}  // namespace spua
