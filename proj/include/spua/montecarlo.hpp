#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spua/policies.hpp"
#include "spua/polytope.hpp"

namespace spua {

// Counter-based generator: output j of stream (seed, stream) is
// mix(key + j * PHI) with the SplitMix64 finalizer as mix and
// key = mix(seed ^ mix(stream * C + D)).  Each trial owns stream = trial
// index, so results are bit-identical regardless of worker-thread count.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_unit();                       // uniform in [0, 1)
    std::uint32_t next_below(std::uint32_t bound);  // unbiased via rejection

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Fisher-Yates; ranks[t-1] becomes the overall rank of the t-th arrival.
void draw_permutation(SubstreamRng& rng, std::vector<int>& ranks);

struct SimConfig {
    long long trials = 0;
    std::uint64_t seed = 0;
    PolicyTable policy;
    std::optional<UtilityVector> utility;
    int threads = 0;  // 0: SPUA_THREADS env var, else 1
};

struct SimReport {
    long long trials = 0;
    std::uint64_t seed = 0;
    int n = 0;
    double p = 1.0;
    Eigen::VectorXd collect_freq;    // per k, collected rank <= k
    Eigen::VectorXd collect_stderr;
    long long accept_count = 0;      // trials that collected someone
    bool has_utility = false;
    double utility_mean = 0.0;
    double utility_stderr = 0.0;
    bool availability_mode = false;
    double success_freq = 0.0;       // picked the best available candidate
    double success_stderr = 0.0;
};

// Runs cfg.policy on seeded random permutations with acceptance coin flips.
SimReport simulate(const SimConfig& cfg);

// MODEL 2 dynamics: availability drawn on arrival, offers only to available
// candidates per the decision table, offers always succeed.
SimReport simulate_availability_policy(const SimConfig& cfg,
                                       const AvailabilityPolicy& table);

// JSON mirrors EvaluationReport plus stderr arrays and seed/trials fields.
std::string sim_report_to_json(const SimReport& report);

int resolve_thread_count(int requested);

}  // namespace spua
