#pragma once

#include "reveal/model.hpp"
#include "reveal/support.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reveal {

inline constexpr long kDefaultNodeCap = 1L << 22;
inline constexpr int kUnreachable = -1;

struct NodeCapError : std::runtime_error {
    explicit NodeCapError(long cap);
};

struct BeliefEdge {
    int target;
    std::vector<int> signals; // every signal producing this successor, ascending
};

// Reachable fragment of the belief-support MDP. Node 0 is the initial support;
// numbering is BFS order with actions and signals in index order, so it is
// deterministic. Edge probabilities are never materialized (qualitative solving
// needs only successor sets).
struct BeliefMdp {
    std::vector<Support> nodes;
    std::vector<std::vector<BeliefEdge>> edges; // edges[node * action_count + action]
    std::vector<int> priorities;                // max-priority labels
    int action_count = 0;

    int nodeCount() const { return static_cast<int>(nodes.size()); }
    std::vector<BeliefEdge> const& out(int node, int action) const;
    // Node index of a support, or -1 if not reachable.
    int nodeOf(Support const& s) const;
};

// B(b,a,s) = {q' | exists q in b with delta(q,a)(s,q') > 0}; nullopt (the
// INCONSISTENT value) when the set is empty, i.e. the signal cannot occur.
std::optional<Support> update(Pomdp const& pomdp, Support const& support, int action, int signal);

// Left fold of update over an observable history; INCONSISTENT propagates.
std::optional<Support> updateStar(Pomdp const& pomdp, Support support,
                                  std::vector<std::pair<int, int>> const& history);

BeliefMdp buildBeliefMdp(Pomdp const& pomdp, long node_cap = kDefaultNodeCap);

// pri_B(b) = max {p(q) | q in b}, per node.
std::vector<int> liftPriorities(Pomdp const& pomdp, BeliefMdp const& belief);

// Node indices with singleton supports, ascending.
std::vector<int> reachableSingletons(BeliefMdp const& belief);

// BFS distance (edge count) from `from_node` to the nearest singleton node;
// kUnreachable if none. With count_initial=false the start node does not count
// as a target at distance 0 (it may still count if revisited later).
int revelationDistance(BeliefMdp const& belief, bool count_initial = true, int from_node = 0);

// The n-signal family whose shortest revealing sequence from the all-states
// support has length 2^n - 1 (belief supports behave like a binary counter).
Pomdp genExpFamily(int n);

// View with uniform probabilities over successor sets, for the parity solver.
Mdp beliefToMdp(BeliefMdp const& belief);

std::string beliefMdpToDot(BeliefMdp const& belief, Pomdp const& pomdp);

} // namespace reveal
