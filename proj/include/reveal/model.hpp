#pragma once

#include "reveal/support.hpp"

#include <string>
#include <vector>

namespace reveal {

// One positive-probability outcome of playing an action: emit `signal`, move to `next`.
struct TransitionEntry {
    int signal;
    int next;
    double prob;
};

// A POMDP with signal-based observations: each (state, action) row is a joint
// distribution over (signal, next state) pairs. Only positive-mass entries are
// stored, sorted by (signal, next).
struct Pomdp {
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::string> signal_names;
    // Row-major: rows[state * action_count + action].
    std::vector<std::vector<TransitionEntry>> rows;
    std::vector<double> initial_distribution;
    Support initial_support;
    std::vector<int> priorities;

    int stateCount() const { return static_cast<int>(state_names.size()); }
    int actionCount() const { return static_cast<int>(action_names.size()); }
    int signalCount() const { return static_cast<int>(signal_names.size()); }

    std::vector<TransitionEntry> const& row(int state, int action) const;
    std::vector<TransitionEntry>& row(int state, int action);
    int maxPriority() const;
    // Recomputes initial_support from initial_distribution.
    void syncInitialSupport();

    int stateIndex(std::string const& name) const;
    int actionIndex(std::string const& name) const;
    int signalIndex(std::string const& name) const;
};

struct MdpEntry {
    int next;
    double prob;
};

// A plain MDP; an empty row means the action is unavailable in that state.
struct Mdp {
    int state_count = 0;
    int action_count = 0;
    std::vector<std::vector<MdpEntry>> rows; // rows[state * action_count + action]
    std::vector<int> priorities;
    int initial_state = 0;
    std::vector<std::string> state_names; // optional, for display

    std::vector<MdpEntry> const& row(int state, int action) const;
    std::vector<MdpEntry>& row(int state, int action);
};

// Returns every invariant violation as a human-readable string; empty = valid.
std::vector<std::string> validate(Pomdp const& pomdp);

// Marginalizes signals out: delta'(q,a)(q') = sum_s delta(q,a)(s,q').
// If the start distribution is not Dirac, a fresh pre-initial state (index |Q|)
// is appended whose every action branches per the start distribution.
Mdp underlyingMdp(Pomdp const& pomdp);

// Positive-probability successor sets.
std::vector<int> succ(Pomdp const& pomdp, int state, int action);
std::vector<int> succWithSignal(Pomdp const& pomdp, int state, int action, int signal);

// Plain-text rendering of an MDP (for the export command).
std::string serializeMdp(Mdp const& mdp);

} // namespace reveal
