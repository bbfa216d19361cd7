#include "spua/rank_stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spua {

void check_rank_query(int n, int t, int s) {
    if (n < 1) throw std::domain_error("rank query: n must be >= 1");
    if (t < 1 || t > n)
        throw std::domain_error("rank query: stage t=" + std::to_string(t) +
                                " outside [1, " + std::to_string(n) + "]");
    if (s < 1 || s > t)
        throw std::domain_error("rank query: partial rank s=" +
                                std::to_string(s) + " outside [1, " +
                                std::to_string(t) + "]");
}

namespace {
void check_overall(int n, int i, const char* what) {
    if (i < 1 || i > n)
        throw std::domain_error(std::string("rank query: ") + what + "=" +
                                std::to_string(i) + " outside [1, " +
                                std::to_string(n) + "]");
}
}  // namespace

RankKernel::RankKernel(int n) : n_(n), log_fact_(n + 1, 0.0) {
    if (n < 1) throw std::domain_error("RankKernel: n must be >= 1");
    for (int m = 2; m <= n; ++m)
        log_fact_[m] = log_fact_[m - 1] + std::log(static_cast<double>(m));
}

double RankKernel::log_binom(int m, int j) const {
    return log_fact_[m] - log_fact_[j] - log_fact_[m - j];
}

double RankKernel::point_start(int t, int s) const {
    // i = s: C(s-1, s-1) C(n-s, t-s) / C(n, t)
    return std::exp(log_binom(n_ - s, t - s) - log_binom(n_, t));
}

double RankKernel::point(int t, int s, int i) const {
    check_rank_query(n_, t, s);
    check_overall(n_, i, "overall rank i");
    if (i < s || i > n_ - t + s) return 0.0;
    return std::exp(log_binom(i - 1, s - 1) + log_binom(n_ - i, t - s) -
                    log_binom(n_, t));
}

void RankKernel::point_row(int t, int s, double* out) const {
    check_rank_query(n_, t, s);
    for (int i = 0; i < n_; ++i) out[i] = 0.0;
    const int hi = n_ - t + s;
    double v = point_start(t, s);
    out[s - 1] = v;
    for (int i = s; i < hi; ++i) {
        // C(i, s-1)/C(i-1, s-1) = i/(i-s+1);
        // C(n-i-1, t-s)/C(n-i, t-s) = (n-i-t+s)/(n-i)
        v *= static_cast<double>(i) / (i - s + 1) *
             (static_cast<double>(n_ - i - t + s) / (n_ - i));
        out[i] = v;
    }
}

double RankKernel::topk(int t, int s, int k) const {
    check_rank_query(n_, t, s);
    check_overall(n_, k, "threshold k");
    if (k < s) return 0.0;
    const int hi = std::min(k, n_ - t + s);
    double v = point_start(t, s);
    double sum = v;
    for (int i = s; i < hi; ++i) {
        v *= static_cast<double>(i) / (i - s + 1) *
             (static_cast<double>(n_ - i - t + s) / (n_ - i));
        sum += v;
    }
    return sum;
}

double rank_point_prob(int n, int t, int s, int i) {
    return RankKernel(n).point(t, s, i);
}

double rank_topk_prob(int n, int t, int s, int k) {
    return RankKernel(n).topk(t, s, k);
}

BinomialTable::BinomialTable(int n) : n_(n) {
    if (n < 0 || n > 62)
        throw std::domain_error("BinomialTable: need 0 <= n <= 62");
    rows_.resize(static_cast<std::size_t>(n + 1) * (n + 2) / 2, 0);
    for (int m = 0; m <= n; ++m) {
        auto* row = rows_.data() + static_cast<std::size_t>(m) * (m + 1) / 2;
        row[0] = 1;
        for (int j = 1; j <= m; ++j) {
            const auto* prev =
                rows_.data() + static_cast<std::size_t>(m - 1) * m / 2;
            row[j] = (j == m) ? 1 : prev[j - 1] + prev[j];
        }
    }
}

long long BinomialTable::choose(int m, int j) const {
    if (j < 0 || j > m) return 0;
    return rows_[static_cast<std::size_t>(m) * (m + 1) / 2 + j];
}

Rational rank_point_prob_exact(int n, int t, int s, int i) {
    check_rank_query(n, t, s);
    check_overall(n, i, "overall rank i");
    BinomialTable binom(n);
    if (i < s || i > n - t + s) return Rational(0);
    return Rational(binom.choose(i - 1, s - 1)) *
           Rational(binom.choose(n - i, t - s), binom.choose(n, t));
}

Rational rank_topk_prob_exact(int n, int t, int s, int k) {
    check_rank_query(n, t, s);
    check_overall(n, k, "threshold k");
    BinomialTable binom(n);
    Rational sum(0);
    const int hi = std::min(k, n - t + s);
    for (int i = s; i <= hi; ++i)
        sum += Rational(binom.choose(i - 1, s - 1)) *
               Rational(binom.choose(n - i, t - s), binom.choose(n, t));
    return sum;
}

Triangular<double> rank_utility_table(const RankKernel& kernel,
                                      const Eigen::VectorXd& utility) {
    const int n = kernel.n();
    if (utility.size() != n)
        throw std::invalid_argument("rank_utility_table: utility size != n");
    Triangular<double> table(n, 0.0);
    std::vector<double> row(n);
    for (int t = 1; t <= n; ++t) {
        for (int s = 1; s <= t; ++s) {
            kernel.point_row(t, s, row.data());
            double acc = 0.0;
            for (int i = s - 1; i <= n - t + s - 1; ++i)
                acc += utility[i] * row[i];
            table(t, s) = acc;
        }
    }
    return table;
}

}  // namespace spua
