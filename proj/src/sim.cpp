#include "reveal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reveal {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::nextDouble() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::vector<int> SimTrace::prioritiesSeen(Pomdp const& pomdp) const {
    std::vector<int> out;
    out.reserve(steps.size());
    for (auto const& step : steps) {
        out.push_back(pomdp.priorities[step.state]);
    }
    return out;
}

namespace {

int sampleInitial(Pomdp const& pomdp, double roll) {
    double acc = 0.0;
    int last = -1;
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        double p = pomdp.initial_distribution[q];
        if (p > 0.0) {
            acc += p;
            last = q;
            if (roll < acc) {
                return q;
            }
        }
    }
    return last; // guard against rounding at the top of the CDF
}

} // namespace

SimTrace simulate(Pomdp const& pomdp, Controller* controller, int horizon, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SimTrace trace;
    trace.seed = seed;
    trace.initial_state = sampleInitial(pomdp, rng.nextDouble());
    if (controller) {
        controller->reset();
    }
    int state = trace.initial_state;
    for (int t = 0; t < horizon; ++t) {
        int action;
        if (controller) {
            try {
                action = controller->act();
            } catch (std::domain_error const& e) {
                throw std::domain_error("step " + std::to_string(t) + ": " + e.what());
            }
        } else {
            action = static_cast<int>(rng.nextDouble() * pomdp.actionCount());
            action = std::min(action, pomdp.actionCount() - 1);
        }
        auto const& row = pomdp.row(state, action);
        double roll = rng.nextDouble();
        double acc = 0.0;
        TransitionEntry const* picked = &row.back();
        for (auto const& e : row) {
            acc += e.prob;
            if (roll < acc) {
                picked = &e;
                break;
            }
        }
        state = picked->next;
        trace.steps.push_back({state, action, picked->signal});
        if (controller) {
            controller->observe(action, picked->signal);
        }
    }
    return trace;
}

std::vector<int> badMetricOfPriorities(std::vector<int> const& priorities_seen) {
    std::vector<int> metric;
    metric.reserve(priorities_seen.size());
    std::map<int, int> pending; // odd priority -> earliest untrumped step
    for (int t = 0; t < static_cast<int>(priorities_seen.size()); ++t) {
        int const p = priorities_seen[t];
        if (p % 2 == 1) {
            pending.try_emplace(p, t);
        } else {
            // An even priority trumps every pending odd priority below it.
            std::erase_if(pending, [p](auto const& entry) { return entry.first < p; });
        }
        int oldest = t;
        for (auto const& [priority, step] : pending) {
            oldest = std::min(oldest, step);
        }
        metric.push_back(pending.empty() ? 0 : t - oldest);
    }
    return metric;
}

std::vector<int> badMetric(SimTrace const& trace, std::vector<int> const& priorities) {
    std::vector<int> seen;
    seen.reserve(trace.steps.size());
    for (auto const& step : trace.steps) {
        seen.push_back(priorities[step.state]);
    }
    return badMetricOfPriorities(seen);
}

namespace {

struct RunResult {
    std::vector<int> metric;
    std::vector<int> priorities;
    int final_state = 0;
};

RunResult oneRun(Pomdp const& pomdp, BeliefStrategy const* strategy, int horizon,
                 std::uint64_t seed) {
    RunResult result;
    if (strategy) {
        Controller controller(pomdp, *strategy);
        SimTrace trace = simulate(pomdp, &controller, horizon, seed);
        result.priorities = trace.prioritiesSeen(pomdp);
        result.metric = badMetricOfPriorities(result.priorities);
        result.final_state = trace.steps.empty() ? trace.initial_state : trace.steps.back().state;
    } else {
        SimTrace trace = simulate(pomdp, nullptr, horizon, seed);
        result.priorities = trace.prioritiesSeen(pomdp);
        result.metric = badMetricOfPriorities(result.priorities);
        result.final_state = trace.steps.empty() ? trace.initial_state : trace.steps.back().state;
    }
    return result;
}

} // namespace

BatchStats batchSimulate(Pomdp const& pomdp, BeliefStrategy const* strategy, int runs, int horizon,
                         std::uint64_t seed, std::ostream* csv_out, bool parallel) {
    std::vector<RunResult> results(runs);
    std::string failure;
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < runs; ++i) {
            try {
                results[i] = oneRun(pomdp, strategy, horizon, seed + i);
            } catch (std::exception const& e) {
#pragma omp critical
                failure = e.what();
            }
        }
    } else
#endif
    {
        (void)parallel;
        for (int i = 0; i < runs; ++i) {
            results[i] = oneRun(pomdp, strategy, horizon, seed + i);
        }
    }
    if (!failure.empty()) {
        throw std::runtime_error(failure);
    }

    BatchStats stats;
    stats.runs = runs;
    stats.mean_metric.assign(horizon, 0.0);
    stats.max_metric.assign(horizon, 0);
    double final_sum = 0.0;
    for (auto const& run : results) {
        for (int t = 0; t < horizon; ++t) {
            stats.mean_metric[t] += run.metric[t];
            stats.max_metric[t] = std::max(stats.max_metric[t], run.metric[t]);
        }
        if (!run.metric.empty()) {
            final_sum += run.metric.back();
        }
        stats.reached[pomdp.state_names[run.final_state]] += 1;
    }
    if (runs > 0) {
        for (int t = 0; t < horizon; ++t) {
            stats.mean_metric[t] /= runs;
        }
        stats.mean_final_metric = final_sum / runs;
    }

    if (csv_out) {
        *csv_out << "run,step,metric,priority\n";
        for (int i = 0; i < runs; ++i) {
            for (int t = 0; t < horizon; ++t) {
                *csv_out << i << "," << (t + 1) << "," << results[i].metric[t] << ","
                         << results[i].priorities[t] << "\n";
            }
        }
    }
    return stats;
}

std::string statsToJson(BatchStats const& stats) {
    nlohmann::ordered_json doc;
    doc["runs"] = stats.runs;
    doc["reached"] = nlohmann::ordered_json::object();
    for (auto const& [name, count] : stats.reached) {
        doc["reached"][name] = count;
    }
    doc["mean_final_metric"] = stats.mean_final_metric;
    return doc.dump(2) + "\n";
}

} // namespace reveal
