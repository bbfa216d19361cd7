#include "oracle_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "spua/montecarlo.hpp"
#include "spua/simplex.hpp"

namespace spua::testing {

PermutationCounts::PermutationCounts(int n) : n_(n) {
    if (n < 1 || n > 8)
        throw std::invalid_argument("PermutationCounts: need 1 <= n <= 8");
    factorial_ = 1;
    for (int i = 2; i <= n; ++i) factorial_ *= i;
    counts_.assign(static_cast<std::size_t>(n) * n * n, 0);

    std::vector<int> ranks(n);
    std::iota(ranks.begin(), ranks.end(), 1);
    do {
        for (int t = 1; t <= n; ++t) {
            int s = 1;
            for (int tau = 1; tau < t; ++tau)
                if (ranks[tau - 1] < ranks[t - 1]) ++s;
            const int i = ranks[t - 1];
            ++counts_[((t - 1) * n_ + (s - 1)) * n_ + (i - 1)];
        }
    } while (std::next_permutation(ranks.begin(), ranks.end()));
}

Rational PermutationCounts::point_prob(int t, int s, int i) const {
    // Prob(r_t = s) = 1/t exactly, so the conditional is hits * t / n!.
    return Rational(hits(t, s, i) * t, factorial_);
}

Rational PermutationCounts::topk_prob(int t, int s, int k) const {
    Rational sum(0);
    for (int i = 1; i <= k; ++i) sum += point_prob(t, s, i);
    return sum;
}

double classical_secretary_value(int n) {
    // v(t,s) = max{ Prob(R_t=1 | r_t=s), mean of v(t+1, .) } with
    // Prob(R_t=1 | r_t=1) = t/n and 0 for s > 1.
    std::vector<double> next(n + 2, 0.0), cur(n + 1, 0.0);
    for (int t = n; t >= 1; --t) {
        double vsum = 0.0;
        if (t < n)
            for (int s = 1; s <= t + 1; ++s) vsum += next[s];
        const double cont = vsum / (t + 1);
        for (int s = 1; s <= t; ++s) {
            const double offer = s == 1 ? static_cast<double>(t) / n : 0.0;
            cur[s] = std::max(offer, cont);
        }
        for (int s = 1; s <= t; ++s) next[s] = cur[s];
    }
    return cur[1];
}

double classical_secretary_lp_value(int n) {
    // max sum_t (t/n) x_t  s.t.  x_t <= (1/t)(1 - sum_{tau<t} x_tau)
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b(n), c(n);
    for (int t = 1; t <= n; ++t) {
        for (int tau = 1; tau < t; ++tau) A(t - 1, tau - 1) = 1.0 / t;
        A(t - 1, t - 1) = 1.0;
        b[t - 1] = 1.0 / t;
        c[t - 1] = static_cast<double>(t) / n;
    }
    SimplexResult r = simplex_maximize(
        A, b, c, std::vector<RowSense>(n, RowSense::le));
    if (r.status != SimplexStatus::optimal)
        throw std::runtime_error("classical secretary LP did not solve");
    return r.objective;
}

namespace {

double gamma_n2(double p, double q1, double q21, double q22) {
    const double reach2 = 1.0 - p * q1;
    const double f1 = 0.5 * q1 + 0.5 * reach2 * q21;
    const double collect_any = p * (q1 + 0.5 * reach2 * (q21 + q22));
    const double f2 = collect_any / (1.0 - (1.0 - p) * (1.0 - p));
    return std::min(f1, f2);
}

}  // namespace

double brute_force_gamma_n2(double p) {
    double best = -1.0, b1 = 0, b2 = 0, b3 = 0;
    const int grid = 100;
    for (int i = 0; i <= grid; ++i)
        for (int j = 0; j <= grid; ++j)
            for (int k = 0; k <= grid; ++k) {
                const double v = gamma_n2(p, i * 0.01, j * 0.01, k * 0.01);
                if (v > best) {
                    best = v;
                    b1 = i * 0.01;
                    b2 = j * 0.01;
                    b3 = k * 0.01;
                }
            }
    double w = 0.01;  // shrink-box refinement around the incumbent
    for (int round = 0; round < 12; ++round) {
        double nb = best, n1 = b1, n2 = b2, n3 = b3;
        for (int i = -10; i <= 10; ++i)
            for (int j = -10; j <= 10; ++j)
                for (int k = -10; k <= 10; ++k) {
                    const double q1 = std::clamp(b1 + i * w / 10, 0.0, 1.0);
                    const double q2 = std::clamp(b2 + j * w / 10, 0.0, 1.0);
                    const double q3 = std::clamp(b3 + k * w / 10, 0.0, 1.0);
                    const double v = gamma_n2(p, q1, q2, q3);
                    if (v > nb) {
                        nb = v;
                        n1 = q1;
                        n2 = q2;
                        n3 = q3;
                    }
                }
        best = nb;
        b1 = n1;
        b2 = n2;
        b3 = n3;
        w /= 5.0;
    }
    return best;
}

double tamaki_value_n2_bruteforce(double p) {
    // Rules decide offers at (1,1), (2,1), (2,2), all "if available".
    double best = 0.0;
    for (int rule = 0; rule < 8; ++rule) {
        const bool r11 = rule & 1, r21 = rule & 2, r22 = rule & 4;
        double value = 0.0;
        for (int perm = 0; perm < 2; ++perm) {
            // perm 0: ranks (1,2); perm 1: ranks (2,1)
            const int rank1 = perm == 0 ? 1 : 2;
            const int rank2 = perm == 0 ? 2 : 1;
            const int s2 = rank2 < rank1 ? 1 : 2;
            for (int a1 = 0; a1 <= 1; ++a1)
                for (int a2 = 0; a2 <= 1; ++a2) {
                    const double prob = 0.5 * (a1 ? p : 1 - p) * (a2 ? p : 1 - p);
                    int best_avail = 3;
                    if (a1) best_avail = std::min(best_avail, rank1);
                    if (a2) best_avail = std::min(best_avail, rank2);
                    int picked = 0;
                    if (a1 && r11)
                        picked = rank1;
                    else if (a2 && (s2 == 1 ? r21 : r22))
                        picked = rank2;
                    if (picked != 0 && picked == best_avail) value += prob;
                }
        }
        best = std::max(best, value);
    }
    return best;
}

PolicyTable random_policy(int n, double p, std::uint64_t seed) {
    SubstreamRng rng(seed, 0x706f6c);
    PolicyTable policy(n, p);
    for (double& q : policy.q.flat()) q = rng.next_unit();
    return policy;
}

Eigen::VectorXd random_nonincreasing_utility(int n, std::uint64_t seed) {
    SubstreamRng rng(seed, 0x757469);
    Eigen::VectorXd u(n);
    double level = 1.0;
    for (int i = 0; i < n; ++i) {
        u[i] = level;
        level *= rng.next_unit();
    }
    return u;
}

Eigen::VectorXd random_simplex_weights(int n, std::uint64_t seed) {
    SubstreamRng rng(seed, 0x73696d);
    Eigen::VectorXd u(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        u[i] = -std::log(1.0 - rng.next_unit());
        sum += u[i];
    }
    u /= sum;
    // float-exact renormalization so the sum is >= 1
    const double resid = 1.0 - u.sum();
    u[n - 1] = std::max(0.0, u[n - 1] + resid + 1e-15);
    return u;
}

StateFrequency simulate_offer_frequencies(const PolicyTable& policy,
                                          long long trials,
                                          std::uint64_t seed) {
    const int n = policy.n;
    Triangular<long long> counts(n, 0);
    std::vector<int> ranks(n);
    for (long long trial = 0; trial < trials; ++trial) {
        SubstreamRng rng(seed, static_cast<std::uint64_t>(trial) + 0x0f5e7);
        draw_permutation(rng, ranks);
        for (int t = 1; t <= n; ++t) {
            int s = 1;
            for (int tau = 1; tau < t; ++tau)
                if (ranks[tau - 1] < ranks[t - 1]) ++s;
            const double q = policy.q(t, s);
            const bool offer =
                q >= 1.0 ? true : (q <= 0.0 ? false : rng.next_unit() < q);
            if (!offer) continue;
            ++counts(t, s);
            if (rng.next_unit() < policy.p) break;  // accepted, process ends
        }
    }
    StateFrequency out;
    out.freq = Triangular<double>(n, 0.0);
    out.stderr_ = Triangular<double>(n, 0.0);
    const double T = static_cast<double>(trials);
    for (int t = 1; t <= n; ++t)
        for (int s = 1; s <= t; ++s) {
            const double f = counts(t, s) / T;
            out.freq(t, s) = f;
            out.stderr_(t, s) = std::sqrt(std::max(f * (1.0 - f), 1e-12) / T);
        }
    return out;
}

}  // namespace spua::testing
