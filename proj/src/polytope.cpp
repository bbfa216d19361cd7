#include "spua/polytope.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace spua {

namespace {
void check_instance(int n, double p, const char* who) {
    if (n < 1)
        throw std::invalid_argument(std::string(who) + ": n must be >= 1");
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument(std::string(who) + ": p must be in (0, 1]");
}
}  // namespace

PolicyTable::PolicyTable(int n, double p) : n(n), p(p), q(n, 0.0) {
    check_instance(n, p, "PolicyTable");
}

void PolicyTable::validate() const {
    check_instance(n, p, "PolicyTable");
    if (q.stages() != n)
        throw std::invalid_argument("PolicyTable: table size != n");
    for (double v : q.flat())
        if (!(v >= 0.0) || v > 1.0)
            throw std::invalid_argument(
                "PolicyTable: offer probability outside [0, 1]");
}

OccupancyMeasure::OccupancyMeasure(int n, double p)
    : n(n), p(p), x(n, 0.0), y(n, 0.0) {
    check_instance(n, p, "OccupancyMeasure");
}

OccupancyMeasure policy_to_occupancy(const PolicyTable& policy) {
    policy.validate();
    const int n = policy.n;
    const double p = policy.p;
    OccupancyMeasure occ(n, p);
    double reach = 1.0;
    for (int t = 1; t <= n; ++t) {
        const double share = reach / t;
        double next = 0.0;
        for (int s = 1; s <= t; ++s) {
            const double qts = policy.q(t, s);
            occ.x(t, s) = share * qts;
            occ.y(t, s) = share * (1.0 - qts);
            next += occ.y(t, s) + (1.0 - p) * occ.x(t, s);
        }
        reach = next;
    }
    return occ;
}

PolicyTable occupancy_to_policy(const OccupancyMeasure& occ, double tol) {
    check_instance(occ.n, occ.p, "occupancy_to_policy");
    const int n = occ.n;
    const double p = occ.p;
    if (occ.x.stages() != n || occ.y.stages() != n)
        throw std::invalid_argument("occupancy_to_policy: table size != n");

    for (std::size_t i = 0; i < occ.x.flat().size(); ++i)
        if (occ.x.flat()[i] < -tol || occ.y.flat()[i] < -tol)
            throw std::invalid_argument(
                "occupancy_to_policy: negative occupancy entry");

    PolicyTable policy(n, p);
    double denom = 1.0;  // shared right-hand side of stage t, times t
    for (int t = 1; t <= n; ++t) {
        double next = 0.0;
        for (int s = 1; s <= t; ++s) {
            const double cell = occ.x(t, s) + occ.y(t, s);
            if (std::abs(cell - denom / t) > tol)
                throw std::invalid_argument(
                    "occupancy_to_policy: stage " + std::to_string(t) +
                    " mass violates the polytope equalities");
            double q = denom > tol ? t * occ.x(t, s) / denom : 0.0;
            policy.q(t, s) = std::min(1.0, std::max(0.0, q));
            next += occ.y(t, s) + (1.0 - p) * occ.x(t, s);
        }
        denom = next;
    }
    return policy;
}

double reach_probability(const OccupancyMeasure& occ, int t) {
    if (t < 1 || t > occ.n)
        throw std::invalid_argument("reach_probability: t outside [1, n]");
    double offered = 0.0;
    for (int tau = 1; tau < t; ++tau)
        for (int s = 1; s <= tau; ++s) offered += occ.x(tau, s);
    return 1.0 - occ.p * offered;
}

std::string policy_to_json(const PolicyTable& policy) {
    nlohmann::json j;
    j["n"] = policy.n;
    j["p"] = policy.p;
    auto rows = nlohmann::json::array();
    for (int t = 1; t <= policy.n; ++t) {
        auto row = nlohmann::json::array();
        for (int s = 1; s <= t; ++s) row.push_back(policy.q(t, s));
        rows.push_back(std::move(row));
    }
    j["q"] = std::move(rows);
    return j.dump();
}

PolicyTable policy_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("n") || !j.contains("p") ||
        !j.contains("q"))
        throw std::invalid_argument("policy JSON: expected {n, p, q}");
    PolicyTable policy(j.at("n").get<int>(), j.at("p").get<double>());
    const auto& rows = j.at("q");
    if (!rows.is_array() || static_cast<int>(rows.size()) != policy.n)
        throw std::invalid_argument("policy JSON: q must have n rows");
    for (int t = 1; t <= policy.n; ++t) {
        const auto& row = rows[t - 1];
        if (!row.is_array() || static_cast<int>(row.size()) != t)
            throw std::invalid_argument("policy JSON: q[" + std::to_string(t - 1) +
                                        "] must have " + std::to_string(t) +
                                        " entries");
        for (int s = 1; s <= t; ++s) policy.q(t, s) = row[s - 1].get<double>();
    }
    policy.validate();
    return policy;
}

}  // namespace spua
