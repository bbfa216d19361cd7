#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "spua/rational.hpp"
#include "spua/triangular.hpp"

namespace spua {

// Throws std::domain_error unless 1 <= s <= t <= n.
void check_rank_query(int n, int t, int s);

// Combinatorial kernel for one candidate count n, relating the partial rank
// r_t of the t-th arrival to its overall rank R_t:
//
//   Prob(R_t = i | r_t = s) = C(i-1, s-1) C(n-i, t-s) / C(n, t)
//
// supported on s <= i <= n-t+s.  Binomials are evaluated in the log domain
// (a per-n log-factorial table), and whole rank rows are produced by a
// multiplicative recurrence so a row costs O(n) with no exp per entry.
class RankKernel {
public:
    explicit RankKernel(int n);

    int n() const { return n_; }

    // Prob(R_t = i | r_t = s); zero outside the support, throws on invalid
    // (t, s) or i outside [1, n].
    double point(int t, int s, int i) const;

    // Prob(R_t <= k | r_t = s); throws on invalid indices.
    double topk(int t, int s, int k) const;

    // Fills out[0..n-1] with point(t, s, 1..n).
    void point_row(int t, int s, double* out) const;

    double log_binom(int m, int j) const;

private:
    double point_start(int t, int s) const;  // value at i = s

    int n_;
    std::vector<double> log_fact_;
};

double rank_point_prob(int n, int t, int s, int i);
double rank_topk_prob(int n, int t, int s, int k);

// Exact path.  Pascal's triangle on 64-bit integers, valid through n = 62;
// the rational results are reduced fractions with denominator dividing
// C(n, t).  Used as the test-oracle arithmetic for n <= 30.
class BinomialTable {
public:
    explicit BinomialTable(int n);
    long long choose(int m, int j) const;
    int n() const { return n_; }

private:
    int n_;
    std::vector<long long> rows_;  // packed triangle
};

Rational rank_point_prob_exact(int n, int t, int s, int i);
Rational rank_topk_prob_exact(int n, int t, int s, int k);

// U_t(s) = sum_i utility[i-1] * Prob(R_t = i | r_t = s) for every state.
Triangular<double> rank_utility_table(const RankKernel& kernel,
                                      const Eigen::VectorXd& utility);

}  // namespace spua
