#pragma once

#include "reveal/belief.hpp"
#include "reveal/model.hpp"
#include "reveal/support.hpp"

#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace reveal {

struct StrongCounterexample {
    int from;
    int action;
    int to;
};

struct WeakWitness {
    Support singleton; // the revealed support that can escape
    Support escape;    // a support from which singletons are avoidable forever
};

struct RevealingVerdict {
    bool strongly = false;
    bool weakly = false;
    std::optional<StrongCounterexample> strong_counterexample;
    std::optional<WeakWitness> weak_witness;
};

// Signals that pin the next state to q: every occurrence of the signal,
// under any action and from any source, enters q. Signals that occur on no
// transition at all are excluded.
std::vector<int> revealingSignals(Pomdp const& pomdp, int state);

// True iff every positive-probability (q, a, q') can also happen with a signal
// revealing q'. On false, the first failing triple in (q, a, q') index order.
std::pair<bool, std::optional<StrongCounterexample>> isStronglyRevealing(Pomdp const& pomdp);

// Two-player pair game over (b1, b2) with b2 subseteq b1 and b1 outside the
// avoid set: Player 1 picks actions, Player 2 resolves signals consistent with
// b2; a move loses (reaches the sink) iff the b1-update lands in the avoid set.
struct SafetyGame {
    static constexpr int kSink = -1;

    struct P1Node {
        Support b1;
        Support b2;
        std::vector<int> moves; // per action -> P2 node index
    };
    struct P2Node {
        int source; // owning P1 node
        int action;
        std::vector<int> succs; // P1 node indices or kSink
    };

    std::vector<P1Node> p1_nodes;
    std::vector<P2Node> p2_nodes;
    int seed_count = 0; // the seed pairs occupy P1 indices [0, seed_count)
};

SafetyGame buildSafetyGame(Pomdp const& pomdp, std::set<Support> const& avoid,
                           std::vector<std::pair<Support, Support>> const& seeds,
                           long node_cap = kDefaultNodeCap);

// Per P1 node: wins Safety(sink), i.e. lies outside the Player-2 attractor of
// the sink (P1 node attracted iff all actions attracted; P2 node iff some
// successor attracted).
std::vector<bool> solveSafetyGame(SafetyGame const& game);

// Whether some strategy avoids `avoid` forever with positive probability from
// `from`: there is an avoid-free-reachable support b and q in b such that
// (b, {q}) wins the safety game. Requires from not in avoid.
bool positiveSafety(Pomdp const& pomdp, std::set<Support> const& avoid, Support const& from,
                    long node_cap = kDefaultNodeCap);

// True iff every strategy sees infinitely many singleton supports almost
// surely. False with a witness when some reachable singleton {q} can, after
// time 0, avoid all singletons forever with positive probability (or, for a
// non-singleton start, when singletons are avoidable from the start outright).
std::pair<bool, std::optional<WeakWitness>> isWeaklyRevealing(Pomdp const& pomdp,
                                                              long node_cap = kDefaultNodeCap,
                                                              bool parallel = true);

RevealingVerdict classifyRevealing(Pomdp const& pomdp, long node_cap = kDefaultNodeCap);

} // namespace reveal
