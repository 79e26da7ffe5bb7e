#pragma once

#include "reveal/model.hpp"
#include "reveal/pipeline.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace reveal {

// Documented 64-bit generator (splitmix64) so traces are reproducible across
// platforms; doubles are drawn from the top 53 bits.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double nextDouble(); // in [0, 1)
};

struct SimStep {
    int state; // state reached after the transition
    int action;
    int signal;
};

struct SimTrace {
    int initial_state = 0;
    std::vector<SimStep> steps;
    std::uint64_t seed = 0;

    // Priority of each step's reached state.
    std::vector<int> prioritiesSeen(Pomdp const& pomdp) const;
};

// Samples the initial state from initial_distribution, then per step an action
// (controller choice, or uniform random when controller is null) and a joint
// (signal, next) outcome by cumulative mass in stored row order. Fully
// deterministic given the seed.
SimTrace simulate(Pomdp const& pomdp, Controller* controller, int horizon, std::uint64_t seed);

// Per-step age of the oldest odd-priority occurrence not yet trumped by a
// strictly larger even priority; 0 when nothing is pending.
std::vector<int> badMetric(SimTrace const& trace, std::vector<int> const& priorities);
std::vector<int> badMetricOfPriorities(std::vector<int> const& priorities_seen);

struct BatchStats {
    int runs = 0;
    std::vector<double> mean_metric; // per step
    std::vector<int> max_metric;     // per step
    std::map<std::string, int> reached;
    double mean_final_metric = 0.0;
};

// Run i uses seed + i; aggregation is independent of execution order, so the
// parallel and serial paths produce identical results.
BatchStats batchSimulate(Pomdp const& pomdp, BeliefStrategy const* strategy, int runs, int horizon,
                         std::uint64_t seed, std::ostream* csv_out = nullptr, bool parallel = true);

std::string statsToJson(BatchStats const& stats);

} // namespace reveal
