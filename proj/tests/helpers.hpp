#pragma once

// Shared fixtures for the test suite: corpus loading, seeded random model
// generators, and a tiny wrapper for driving the CLI binary.

#include "reveal/cassandra.hpp"
#include "reveal/model.hpp"
#include "reveal/sim.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

namespace testutil {

inline std::string dataPath(std::string const& name) {
    return std::string(REVEAL_DATA_DIR) + "/" + name;
}

inline reveal::Pomdp loadCorpus(std::string const& name) {
    return reveal::parsePomdpFile(dataPath(name));
}

struct CliResult {
    int exit_code;
    std::string out;
};

// Runs the CLI with the given argument string; stderr is discarded.
inline CliResult runCli(std::string const& args, std::string const& env = "") {
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string(REVEAL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return {-1, ""};
    }
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) {
        out.append(buf, n);
    }
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

inline int randInt(reveal::SplitMix64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random MDP with every action enabled everywhere (total per the model contract).
inline reveal::Mdp randomMdp(reveal::SplitMix64& rng, int max_states = 6, int max_actions = 3,
                             int max_priority = 3) {
    reveal::Mdp mdp;
    mdp.state_count = randInt(rng, 1, max_states);
    mdp.action_count = randInt(rng, 1, max_actions);
    mdp.rows.resize(static_cast<std::size_t>(mdp.state_count) * mdp.action_count);
    for (auto& row : mdp.rows) {
        int branches = randInt(rng, 1, std::min(3, mdp.state_count));
        std::vector<bool> used(mdp.state_count, false);
        double total = 0.0;
        for (int b = 0; b < branches; ++b) {
            int next = randInt(rng, 0, mdp.state_count - 1);
            if (used[next]) {
                continue;
            }
            used[next] = true;
            double w = rng.nextDouble() + 0.05;
            row.push_back({next, w});
            total += w;
        }
        for (auto& e : row) {
            e.prob /= total;
        }
    }
    mdp.priorities.resize(mdp.state_count);
    for (auto& p : mdp.priorities) {
        p = randInt(rng, 0, max_priority);
    }
    mdp.initial_state = 0;
    return mdp;
}

// Random valid POMDP. Start is Dirac at state 0 unless allow_soft_start, in
// which case roughly half the instances get a multi-state start distribution.
inline reveal::Pomdp randomPomdp(reveal::SplitMix64& rng, int max_states = 5, int max_actions = 2,
                                 int max_signals = 3, int max_priority = 3,
                                 bool allow_soft_start = false) {
    reveal::Pomdp p;
    int states = randInt(rng, 1, max_states);
    int actions = randInt(rng, 1, max_actions);
    int signals = randInt(rng, 1, max_signals);
    for (int q = 0; q < states; ++q) {
        p.state_names.push_back("q" + std::to_string(q));
    }
    for (int a = 0; a < actions; ++a) {
        p.action_names.push_back(std::string(1, static_cast<char>('a' + a)));
    }
    for (int s = 0; s < signals; ++s) {
        p.signal_names.push_back("s" + std::to_string(s));
    }
    p.rows.resize(static_cast<std::size_t>(states) * actions);
    for (auto& row : p.rows) {
        int entries = randInt(rng, 1, 3);
        std::vector<bool> used(static_cast<std::size_t>(signals) * states, false);
        double total = 0.0;
        for (int e = 0; e < entries; ++e) {
            int sig = randInt(rng, 0, signals - 1);
            int next = randInt(rng, 0, states - 1);
            if (used[static_cast<std::size_t>(sig) * states + next]) {
                continue;
            }
            used[static_cast<std::size_t>(sig) * states + next] = true;
            double w = rng.nextDouble() + 0.05;
            row.push_back({sig, next, w});
            total += w;
        }
        for (auto& e : row) {
            e.prob /= total;
        }
        std::sort(row.begin(), row.end(), [](auto const& x, auto const& y) {
            return std::pair(x.signal, x.next) < std::pair(y.signal, y.next);
        });
    }
    p.initial_distribution.assign(states, 0.0);
    if (allow_soft_start && states > 1 && rng.next() % 2 == 0) {
        int k = randInt(rng, 2, states);
        for (int q = 0; q < k; ++q) {
            p.initial_distribution[q] = 1.0 / k;
        }
    } else {
        p.initial_distribution[0] = 1.0;
    }
    p.priorities.resize(states);
    for (auto& pr : p.priorities) {
        pr = randInt(rng, 0, max_priority);
    }
    p.syncInitialSupport();
    return p;
}

} // namespace testutil
