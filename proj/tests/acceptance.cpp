// End-to-end acceptance checks, one test case per shipped guarantee. Each case
// prints a single "[criterion N] PASS|FAIL" line with its runtime.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "reveal/belief.hpp"
#include "reveal/cassandra.hpp"
#include "reveal/mdp_solve.hpp"
#include "reveal/model.hpp"
#include "reveal/pipeline.hpp"
#include "reveal/revelation.hpp"
#include "reveal/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

using namespace reveal;
using testutil::loadCorpus;

namespace {

struct Criterion {
    int id;
    bool ok = true;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Criterion(int id) : id(id) {}

    void expect(bool cond, char const* what) {
        CHECK_MESSAGE(cond, what);
        ok = ok && cond;
    }

    void finish(double budget_seconds) {
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        expect(elapsed < budget_seconds, "runtime budget exceeded");
        std::printf("[criterion %d] %s (%.2f s)\n", id, ok ? "PASS" : "FAIL", elapsed);
        std::fflush(stdout);
    }
};

int strategyAction(Pomdp const& pomdp, BeliefStrategy const& strategy,
                   std::vector<std::string> const& names) {
    std::vector<int> ids;
    for (auto const& n : names) {
        ids.push_back(pomdp.stateIndex(n));
    }
    Support s = Support::of(ids);
    for (std::size_t i = 0; i < strategy.supports.size(); ++i) {
        if (strategy.supports[i] == s) {
            return strategy.actions[i];
        }
    }
    return -1;
}

// Whether every belief node can reach some singleton node (reverse BFS).
bool allNodesReachSingleton(BeliefMdp const& belief) {
    std::vector<std::vector<int>> reverse(belief.nodeCount());
    for (int n = 0; n < belief.nodeCount(); ++n) {
        for (int a = 0; a < belief.action_count; ++a) {
            for (auto const& edge : belief.out(n, a)) {
                reverse[edge.target].push_back(n);
            }
        }
    }
    std::vector<bool> reaches(belief.nodeCount(), false);
    std::vector<int> queue = reachableSingletons(belief);
    for (int n : queue) {
        reaches[n] = true;
    }
    while (!queue.empty()) {
        int n = queue.back();
        queue.pop_back();
        for (int prev : reverse[n]) {
            if (!reaches[prev]) {
                reaches[prev] = true;
                queue.push_back(prev);
            }
        }
    }
    return std::all_of(reaches.begin(), reaches.end(), [](bool b) { return b; });
}

bool roundTrips(Pomdp const& original) {
    auto reparsed = parsePomdp(serializePomdp(original));
    if (reparsed.state_names != original.state_names ||
        reparsed.action_names != original.action_names ||
        reparsed.signal_names != original.signal_names ||
        reparsed.priorities != original.priorities ||
        reparsed.initial_support != original.initial_support) {
        return false;
    }
    for (int q = 0; q < original.stateCount(); ++q) {
        for (int a = 0; a < original.actionCount(); ++a) {
            auto const& lhs = original.row(q, a);
            auto const& rhs = reparsed.row(q, a);
            if (lhs.size() != rhs.size()) {
                return false;
            }
            for (std::size_t i = 0; i < lhs.size(); ++i) {
                if (lhs[i].signal != rhs[i].signal || lhs[i].next != rhs[i].next ||
                    std::abs(lhs[i].prob - rhs[i].prob) >= 1e-9) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("criterion 1: tiger end-to-end") {
    Criterion c(1);
    auto pomdp = loadCorpus("tiger.pomdp");

    auto classified = classifyRevealing(pomdp);
    c.expect(classified.strongly, "tiger classifies strongly revealing");
    c.expect(classified.weakly, "tiger classifies weakly revealing");

    auto verdict = solve(pomdp);
    c.expect(verdict.answer == Answer::ExactYes, "tiger solves to EXACT_YES");
    c.expect(verdict.strategy.has_value(), "tiger has a strategy");
    if (verdict.strategy) {
        auto const& strategy = *verdict.strategy;
        c.expect(strategyAction(pomdp, strategy, {"tiger-left", "tiger-right"}) ==
                     pomdp.actionIndex("listen"),
                 "uncertain support listens");
        c.expect(strategyAction(pomdp, strategy, {"tiger-left"}) ==
                     pomdp.actionIndex("open-right"),
                 "tiger on the left opens the right door");
        c.expect(strategyAction(pomdp, strategy, {"tiger-right"}) ==
                     pomdp.actionIndex("open-left"),
                 "tiger on the right opens the left door");

        // 500 runs of 500 steps, seed 42 (run i uses seed 42 + i).
        int done = pomdp.stateIndex("done");
        int absorbed = 0;
        bool metric_clean = true;
        for (int run = 0; run < 500; ++run) {
            Controller controller(pomdp, strategy);
            auto trace = simulate(pomdp, &controller, 500, 42 + run);
            if (trace.steps.back().state != done) {
                continue;
            }
            ++absorbed;
            auto metric = badMetric(trace, pomdp.priorities);
            bool seen_done = false;
            for (std::size_t t = 0; t < trace.steps.size(); ++t) {
                seen_done = seen_done || trace.steps[t].state == done;
                if (seen_done && metric[t] != 0) {
                    metric_clean = false;
                }
            }
        }
        c.expect(absorbed >= 499, "at least 499 of 500 runs are absorbed in done");
        c.expect(metric_clean, "bad-event metric is 0 from absorption onward");
    }
    c.finish(5.0);
}

TEST_CASE("criterion 2: unsound belief verdict on the single-signal instance") {
    Criterion c(2);
    auto pomdp = loadCorpus("single-signal.pomdp");
    c.expect(!classifyRevealing(pomdp).weakly, "not weakly revealing");
    auto verdict = solve(pomdp);
    c.expect(verdict.belief_mdp_winning, "belief abstraction claims a win");
    c.expect(verdict.answer == Answer::Unknown, "answer stays UNKNOWN");
    c.expect(verdict.regime == Regime::General, "regime is GENERAL");
    c.finish(1.0);
}

TEST_CASE("criterion 3: weakly revealing instance with untrusted NO") {
    Criterion c(3);
    auto pomdp = loadCorpus("reset-loop.pomdp");
    auto classified = classifyRevealing(pomdp);
    c.expect(!classified.strongly, "not strongly revealing");
    c.expect(classified.weakly, "weakly revealing");

    auto belief = buildBeliefMdp(pomdp);
    c.expect(belief.nodeCount() == 3, "belief MDP has exactly 3 nodes");
    auto pri = liftPriorities(pomdp, belief);
    std::multiset<int> lifted(pri.begin(), pri.end());
    c.expect(lifted == std::multiset<int>{1, 1, 3}, "lifted priorities are {1,1,3}");

    auto verdict = solve(pomdp);
    c.expect(!verdict.belief_mdp_winning, "belief abstraction loses");
    c.expect(verdict.answer == Answer::Unknown, "answer stays UNKNOWN");
    c.expect(verdict.regime == Regime::WeakHigh, "regime is WEAK_HIGH");
    c.finish(1.0);
}

TEST_CASE("criterion 4: MDP win lost under forced revelations") {
    Criterion c(4);
    auto pomdp = loadCorpus("blind-split.pomdp");

    auto mdp = underlyingMdp(pomdp);
    auto parity = almostSureParity(mdp, mdp.priorities);
    c.expect(std::find(parity.winning.begin(), parity.winning.end(), mdp.initial_state) !=
                 parity.winning.end(),
             "underlying MDP wins from the initial state");

    auto sr = transformSr(pomdp, 0.1);
    c.expect(classifyRevealing(sr).strongly, "the transform is strongly revealing");
    auto verdict = solve(sr);
    c.expect(verdict.answer == Answer::ExactNo, "the revealing version solves to EXACT_NO");
    c.finish(1.0);
}

TEST_CASE("criterion 5: exponential revelation distances") {
    Criterion c(5);
    for (int n = 2; n <= 8; ++n) {
        auto pomdp = genExpFamily(n);
        auto belief = buildBeliefMdp(pomdp);
        std::vector<int> all;
        for (int q = 1; q <= n + 1; ++q) {
            all.push_back(q);
        }
        int start = belief.nodeOf(Support::of(all));
        c.expect(start >= 0, "the post-initial all-states support is reachable");
        c.expect(start >= 0 && revelationDistance(belief, true, start) == (1 << n) - 1,
                 "revelation distance is 2^n - 1");
    }
    c.finish(10.0);
}

TEST_CASE("criterion 6: parity solver matches the brute-force oracle") {
    Criterion c(6);
    SplitMix64 rng(1006);
    int agreements = 0;
    for (int i = 0; i < 200; ++i) {
        auto mdp = testutil::randomMdp(rng, 6, 3, 3);
        if (almostSureParity(mdp, mdp.priorities).winning ==
            bruteForceParityOracle(mdp, mdp.priorities)) {
            ++agreements;
        }
    }
    c.expect(agreements == 200, "solver and oracle agree on 200/200 random MDPs");
    c.finish(60.0);
}

TEST_CASE("criterion 7: revelation consistency on random POMDPs") {
    Criterion c(7);
    SplitMix64 rng(1007);
    bool implication = true;
    bool transform_strong = true;
    bool singleton_paths = true;
    for (int i = 0; i < 100; ++i) {
        auto pomdp = testutil::randomPomdp(rng, 5, 2, 3);
        auto verdict = classifyRevealing(pomdp);
        if (verdict.strongly && !verdict.weakly) {
            implication = false;
        }
        if (!isStronglyRevealing(transformSr(pomdp, 0.1)).first) {
            transform_strong = false;
        }
        if (verdict.weakly && !allNodesReachSingleton(buildBeliefMdp(pomdp))) {
            singleton_paths = false;
        }
    }
    c.expect(implication, "strongly implies weakly, 100/100");
    c.expect(transform_strong, "the revealing transform is strongly revealing, 100/100");
    c.expect(singleton_paths, "weakly revealing models always keep a path to a revelation");
    c.finish(60.0);
}

TEST_CASE("criterion 8: format round-trip") {
    Criterion c(8);
    for (auto const* name :
         {"tiger.pomdp", "single-signal.pomdp", "reset-loop.pomdp", "blind-split.pomdp"}) {
        c.expect(roundTrips(loadCorpus(name)), name);
    }
    c.expect(roundTrips(genExpFamily(2)), "generated exponential family");
    SplitMix64 rng(1008);
    int survived = 0;
    for (int i = 0; i < 100; ++i) {
        if (roundTrips(testutil::randomPomdp(rng, 5, 2, 3, 3, true))) {
            ++survived;
        }
    }
    c.expect(survived == 100, "random instances round-trip, 100/100");
    c.finish(10.0);
}
