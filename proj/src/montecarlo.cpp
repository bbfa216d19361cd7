#include "spua/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

namespace spua {

namespace {
constexpr std::uint64_t kPhi = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamMul = 0xA24BAED4963EE407ULL;
constexpr std::uint64_t kStreamAdd = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t SubstreamRng::mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(seed ^ mix(stream * kStreamMul + kStreamAdd))) {}

std::uint64_t SubstreamRng::next_u64() { return mix(key_ + (counter_++) * kPhi); }

double SubstreamRng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t SubstreamRng::next_below(std::uint32_t bound) {
    // Lemire's multiply-shift with rejection.
    std::uint64_t x = next_u64() & 0xFFFFFFFFULL;
    std::uint64_t m = x * bound;
    std::uint32_t l = static_cast<std::uint32_t>(m);
    if (l < bound) {
        const std::uint32_t cutoff = (-bound) % bound;
        while (l < cutoff) {
            x = next_u64() & 0xFFFFFFFFULL;
            m = x * bound;
            l = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::uint32_t>(m >> 32);
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPUA_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void draw_permutation(SubstreamRng& rng, std::vector<int>& ranks) {
    const int n = static_cast<int>(ranks.size());
    for (int i = 0; i < n; ++i) ranks[i] = i + 1;
    for (int i = n - 1; i >= 1; --i) {
        int j = static_cast<int>(rng.next_below(i + 1));
        std::swap(ranks[i], ranks[j]);
    }
}

namespace {

// Binary indexed tree over ranks; partial rank of arrival t is
// 1 + #(earlier arrivals with smaller overall rank).
class InsertionCounter {
public:
    explicit InsertionCounter(int n) : n_(n), tree_(n + 1, 0) {}

    void reset() { std::fill(tree_.begin(), tree_.end(), 0); }

    void insert(int rank) {
        for (int i = rank; i <= n_; i += i & (-i)) ++tree_[i];
    }

    int count_leq(int rank) const {
        int c = 0;
        for (int i = rank; i > 0; i -= i & (-i)) c += tree_[i];
        return c;
    }

private:
    int n_;
    std::vector<int> tree_;
};

struct ChunkTotals {
    std::vector<long long> collect_by_rank;  // index 0 unused
    long long accepted = 0;
    long long success = 0;
    double utility_sum = 0.0;
    double utility_sumsq = 0.0;

    explicit ChunkTotals(int n) : collect_by_rank(n + 1, 0) {}

    void absorb(const ChunkTotals& o) {
        for (std::size_t i = 0; i < collect_by_rank.size(); ++i)
            collect_by_rank[i] += o.collect_by_rank[i];
        accepted += o.accepted;
        success += o.success;
        utility_sum += o.utility_sum;
        utility_sumsq += o.utility_sumsq;
    }
};

constexpr long long kChunk = 1 << 16;

template <class TrialBody>
ChunkTotals run_chunked(int n, long long trials, int threads,
                        const TrialBody& body) {
    const long long chunks = (trials + kChunk - 1) / kChunk;
    std::vector<ChunkTotals> partial(chunks, ChunkTotals(n));

    auto run_chunk = [&](long long c) {
        ChunkTotals& acc = partial[c];
        InsertionCounter counter(n);
        std::vector<int> ranks(n);
        std::vector<std::uint8_t> scratch(n);
        const long long hi = std::min(trials, (c + 1) * kChunk);
        for (long long trial = c * kChunk; trial < hi; ++trial)
            body(trial, counter, ranks, scratch, acc);
    };

    threads = static_cast<int>(
        std::max<long long>(1, std::min<long long>(threads, chunks)));
    if (threads == 1) {
        for (long long c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<long long> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                long long c;
                while ((c = next.fetch_add(1)) < chunks) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction: chunk boundaries are independent of the thread
    // count, so the double sums are bit-reproducible.
    ChunkTotals total(n);
    for (long long c = 0; c < chunks; ++c) total.absorb(partial[c]);
    return total;
}

SimReport finalize(const SimConfig& cfg, int n, double p,
                   const ChunkTotals& total, bool availability) {
    SimReport rep;
    rep.trials = cfg.trials;
    rep.seed = cfg.seed;
    rep.n = n;
    rep.p = p;
    rep.availability_mode = availability;
    rep.accept_count = total.accepted;
    rep.collect_freq.resize(n);
    rep.collect_stderr.resize(n);
    const double T = static_cast<double>(cfg.trials);
    long long acc = 0;
    for (int k = 1; k <= n; ++k) {
        acc += total.collect_by_rank[k];
        const double f = acc / T;
        rep.collect_freq[k - 1] = f;
        rep.collect_stderr[k - 1] = std::sqrt(f * (1.0 - f) / T);
    }
    if (cfg.utility) {
        rep.has_utility = true;
        rep.utility_mean = total.utility_sum / T;
        const double var =
            std::max(0.0, total.utility_sumsq / T - rep.utility_mean * rep.utility_mean);
        rep.utility_stderr = std::sqrt(var / T);
    }
    if (availability) {
        const double f = total.success / T;
        rep.success_freq = f;
        rep.success_stderr = std::sqrt(f * (1.0 - f) / T);
    }
    return rep;
}

}  // namespace

SimReport simulate(const SimConfig& cfg) {
    cfg.policy.validate();
    if (cfg.trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    const int n = cfg.policy.n;
    const double p = cfg.policy.p;
    if (cfg.utility && cfg.utility->n() != n)
        throw std::invalid_argument("simulate: utility size != n");

    const auto totals = run_chunked(
        n, cfg.trials, resolve_thread_count(cfg.threads),
        [&](long long trial, InsertionCounter& counter, std::vector<int>& ranks,
            std::vector<std::uint8_t>&, ChunkTotals& acc) {
            SubstreamRng rng(cfg.seed, static_cast<std::uint64_t>(trial));
            draw_permutation(rng, ranks);
            counter.reset();
            int collected = 0;
            for (int t = 1; t <= n; ++t) {
                const int rank = ranks[t - 1];
                const int s = 1 + counter.count_leq(rank);
                counter.insert(rank);
                const double q = cfg.policy.q(t, s);
                const bool offer =
                    q >= 1.0 ? true : (q <= 0.0 ? false : rng.next_unit() < q);
                if (offer && rng.next_unit() < p) {
                    collected = rank;
                    break;
                }
            }
            if (collected > 0) {
                ++acc.accepted;
                ++acc.collect_by_rank[collected];
            }
            if (cfg.utility) {
                const double u =
                    collected > 0 ? cfg.utility->values[collected - 1] : 0.0;
                acc.utility_sum += u;
                acc.utility_sumsq += u * u;
            }
        });
    return finalize(cfg, n, p, totals, /*availability=*/false);
}

SimReport simulate_availability_policy(const SimConfig& cfg,
                                       const AvailabilityPolicy& table) {
    if (cfg.trials < 1)
        throw std::invalid_argument("simulate: trials must be >= 1");
    const int n = table.n;
    const double p = table.p;
    if (n < 1 || !(p > 0.0) || p > 1.0)
        throw std::invalid_argument("simulate: bad availability table");
    if (cfg.utility && cfg.utility->n() != n)
        throw std::invalid_argument("simulate: utility size != n");

    const auto totals = run_chunked(
        n, cfg.trials, resolve_thread_count(cfg.threads),
        [&](long long trial, InsertionCounter& counter, std::vector<int>& ranks,
            std::vector<std::uint8_t>& available, ChunkTotals& acc) {
            SubstreamRng rng(cfg.seed, static_cast<std::uint64_t>(trial));
            draw_permutation(rng, ranks);
            // Availability of every candidate is drawn up front, in arrival
            // order, so the stream layout does not depend on the policy.
            int best_available = n + 1;
            for (int t = 1; t <= n; ++t) {
                available[t - 1] = rng.next_unit() < p ? 1 : 0;
                if (available[t - 1])
                    best_available = std::min(best_available, ranks[t - 1]);
            }
            counter.reset();
            int collected = 0;
            int best_prev_avail = n + 1;
            for (int t = 1; t <= n; ++t) {
                const int rank = ranks[t - 1];
                const int s = 1 + counter.count_leq(rank);
                counter.insert(rank);
                // offers go to contenders only: available and better than
                // every available predecessor
                if (available[t - 1] && rank < best_prev_avail &&
                    table.offer_if_available(t, s)) {
                    collected = rank;
                    break;
                }
                if (available[t - 1])
                    best_prev_avail = std::min(best_prev_avail, rank);
            }
            if (collected > 0) {
                ++acc.accepted;
                ++acc.collect_by_rank[collected];
                if (collected == best_available) ++acc.success;
            }
            if (cfg.utility) {
                const double u =
                    collected > 0 ? cfg.utility->values[collected - 1] : 0.0;
                acc.utility_sum += u;
                acc.utility_sumsq += u * u;
            }
        });
    return finalize(cfg, n, p, totals, /*availability=*/true);
}

std::string sim_report_to_json(const SimReport& report) {
    nlohmann::json j;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["n"] = report.n;
    j["p"] = report.p;
    j["collect"] = std::vector<double>(report.collect_freq.begin(),
                                       report.collect_freq.end());
    j["stderr"] = std::vector<double>(report.collect_stderr.begin(),
                                      report.collect_stderr.end());
    j["accept_count"] = report.accept_count;
    if (report.has_utility) {
        j["utility_mean"] = report.utility_mean;
        j["utility_stderr"] = report.utility_stderr;
    }
    if (report.availability_mode) {
        j["success_freq"] = report.success_freq;
        j["success_stderr"] = report.success_stderr;
    }
    return j.dump();
}

}  // namespace spua
