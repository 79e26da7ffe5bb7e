#pragma once

#include "reveal/model.hpp"

#include <map>
#include <vector>

namespace reveal {

// A closed, strongly connected sub-MDP: for every state and retained action,
// all successors stay inside; the induced graph is strongly connected.
struct EndComponent {
    std::vector<int> states;               // ascending
    std::vector<std::vector<int>> actions; // parallel to states, ascending
};

struct SolveResult {
    std::vector<int> winning;    // ascending state indices
    std::map<int, int> strategy; // state -> action, defined exactly on `winning`
};

// Maximal end components, pairwise disjoint, ordered by minimal state index.
std::vector<EndComponent> mecDecomposition(Mdp const& mdp);

// States with a strategy reaching `target` with probability 1, plus a witness.
SolveResult almostSureReach(Mdp const& mdp, std::vector<int> const& target);

// States with an almost-sure strategy for Parity(priorities): collect MECs
// whose maximal priority is even, then almost-surely reach their union; inside
// a good MEC the strategy cycles through a fixed maximal-priority state.
SolveResult almostSureParity(Mdp const& mdp, std::vector<int> const& priorities);

// Test oracle: enumerates every pure memoryless strategy and analyzes the
// induced chain's bottom SCCs. Capped at 12 states / 4 actions.
std::vector<int> bruteForceParityOracle(Mdp const& mdp, std::vector<int> const& priorities);

} // namespace reveal
