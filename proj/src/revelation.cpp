#include "reveal/revelation.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reveal {

namespace {

std::set<Support> singletonSet(Pomdp const& pomdp) {
    std::set<Support> out;
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        out.insert(Support::singleton(q));
    }
    return out;
}

// Supports reachable from the seeds through update while avoiding `avoid`;
// the seeds themselves are included (they must lie outside `avoid`).
std::vector<Support> safeReachable(Pomdp const& pomdp, std::set<Support> const& avoid,
                                   std::vector<Support> const& seeds, long node_cap) {
    std::vector<Support> nodes;
    std::unordered_map<Support, int, SupportHash> index;
    std::deque<int> queue;
    auto intern = [&](Support const& s) {
        if (index.count(s)) {
            return;
        }
        if (static_cast<long>(nodes.size()) >= node_cap) {
            throw NodeCapError(node_cap);
        }
        index.emplace(s, static_cast<int>(nodes.size()));
        queue.push_back(static_cast<int>(nodes.size()));
        nodes.push_back(s);
    };
    for (auto const& seed : seeds) {
        intern(seed);
    }
    while (!queue.empty()) {
        Support const node = nodes[queue.front()];
        queue.pop_front();
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            for (int s = 0; s < pomdp.signalCount(); ++s) {
                auto next = update(pomdp, node, a, s);
                if (next && !avoid.count(*next)) {
                    intern(*next);
                }
            }
        }
    }
    return nodes;
}

// Positive-safety witness query: is there a support b among `candidates` and a state
// q in b such that (b, {q}) wins the pair safety game? Returns the first such
// b in candidate order.
std::optional<Support> winningEscape(Pomdp const& pomdp, std::set<Support> const& avoid,
                                     std::vector<Support> const& candidates, long node_cap) {
    std::vector<std::pair<Support, Support>> seeds;
    for (auto const& b : candidates) {
        for (int q : b.members()) {
            seeds.push_back({b, Support::singleton(q)});
        }
    }
    if (seeds.empty()) {
        return std::nullopt;
    }
    SafetyGame game = buildSafetyGame(pomdp, avoid, seeds, node_cap);
    auto safe = solveSafetyGame(game);
    for (int i = 0; i < game.seed_count; ++i) {
        if (safe[i]) {
            return game.p1_nodes[i].b1;
        }
    }
    return std::nullopt;
}

// Escape check for a reachable singleton {q}: supports reachable in >= 1 steps
// while avoiding all singletons, then the pair-game witness quantification.
std::optional<Support> singletonEscape(Pomdp const& pomdp, std::set<Support> const& sing,
                                       int q, long node_cap) {
    Support const start = Support::singleton(q);
    std::vector<Support> first_steps;
    for (int a = 0; a < pomdp.actionCount(); ++a) {
        for (int s = 0; s < pomdp.signalCount(); ++s) {
            auto next = update(pomdp, start, a, s);
            if (next && !sing.count(*next)) {
                first_steps.push_back(*next);
            }
        }
    }
    std::sort(first_steps.begin(), first_steps.end());
    first_steps.erase(std::unique(first_steps.begin(), first_steps.end()), first_steps.end());
    if (first_steps.empty()) {
        return std::nullopt;
    }
    auto candidates = safeReachable(pomdp, sing, first_steps, node_cap);
    return winningEscape(pomdp, sing, candidates, node_cap);
}

} // namespace

std::vector<int> revealingSignals(Pomdp const& pomdp, int state) {
    if (state < 0 || state >= pomdp.stateCount()) {
        throw std::out_of_range("unknown state index");
    }
    // targets[s] = set of states the signal can enter, over all (q, a).
    std::vector<std::vector<bool>> targets(pomdp.signalCount(),
                                           std::vector<bool>(pomdp.stateCount(), false));
    std::vector<bool> occurs(pomdp.signalCount(), false);
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            for (auto const& e : pomdp.row(q, a)) {
                targets[e.signal][e.next] = true;
                occurs[e.signal] = true;
            }
        }
    }
    std::vector<int> out;
    for (int s = 0; s < pomdp.signalCount(); ++s) {
        if (!occurs[s]) {
            continue;
        }
        bool pins = true;
        for (int r = 0; r < pomdp.stateCount(); ++r) {
            if (r != state && targets[s][r]) {
                pins = false;
                break;
            }
        }
        if (pins && targets[s][state]) {
            out.push_back(s);
        }
    }
    return out;
}

std::pair<bool, std::optional<StrongCounterexample>> isStronglyRevealing(Pomdp const& pomdp) {
    std::vector<std::vector<int>> revealing(pomdp.stateCount());
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        revealing[q] = revealingSignals(pomdp, q);
    }
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            for (int next : succ(pomdp, q, a)) {
                bool ok = false;
                for (auto const& e : pomdp.row(q, a)) {
                    if (e.next == next &&
                        std::binary_search(revealing[next].begin(), revealing[next].end(),
                                           e.signal)) {
                        ok = true;
                        break;
                    }
                }
                if (!ok) {
                    return {false, StrongCounterexample{q, a, next}};
                }
            }
        }
    }
    return {true, std::nullopt};
}

SafetyGame buildSafetyGame(Pomdp const& pomdp, std::set<Support> const& avoid,
                           std::vector<std::pair<Support, Support>> const& seeds, long node_cap) {
    SafetyGame game;
    std::map<std::pair<Support, Support>, int> index;
    std::deque<int> queue;
    auto intern = [&](Support const& b1, Support const& b2) {
        auto key = std::make_pair(b1, b2);
        auto it = index.find(key);
        if (it != index.end()) {
            return it->second;
        }
        if (static_cast<long>(game.p1_nodes.size()) >= node_cap) {
            throw NodeCapError(node_cap);
        }
        int id = static_cast<int>(game.p1_nodes.size());
        game.p1_nodes.push_back({b1, b2, {}});
        index.emplace(key, id);
        queue.push_back(id);
        return id;
    };
    for (auto const& [b1, b2] : seeds) {
        if (avoid.count(b1)) {
            throw std::invalid_argument("safety-game seed lies in the avoid set");
        }
        if (!b2.subsetOf(b1)) {
            throw std::invalid_argument("safety-game seed violates b2 subseteq b1");
        }
        intern(b1, b2);
    }
    game.seed_count = static_cast<int>(game.p1_nodes.size());

    while (!queue.empty()) {
        int const id = queue.front();
        queue.pop_front();
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            SafetyGame::P2Node p2{id, a, {}};
            for (int s = 0; s < pomdp.signalCount(); ++s) {
                // Player 2 may pick any signal consistent with b2; the move is
                // losing for Player 1 iff the b1-update lands in the avoid set.
                auto u2 = update(pomdp, game.p1_nodes[id].b2, a, s);
                if (!u2) {
                    continue;
                }
                auto u1 = update(pomdp, game.p1_nodes[id].b1, a, s);
                if (avoid.count(*u1)) {
                    p2.succs.push_back(SafetyGame::kSink);
                } else {
                    p2.succs.push_back(intern(*u1, *u2));
                }
            }
            game.p1_nodes[id].moves.push_back(static_cast<int>(game.p2_nodes.size()));
            game.p2_nodes.push_back(std::move(p2));
        }
    }
    return game;
}

std::vector<bool> solveSafetyGame(SafetyGame const& game) {
    // Player-2 attractor of the sink: a P2 node is attracted iff some successor
    // is; a P1 node iff all its actions are.
    std::vector<bool> p1_attracted(game.p1_nodes.size(), false);
    std::vector<bool> p2_attracted(game.p2_nodes.size(), false);
    std::vector<int> p1_pending(game.p1_nodes.size());
    for (std::size_t i = 0; i < game.p1_nodes.size(); ++i) {
        p1_pending[i] = static_cast<int>(game.p1_nodes[i].moves.size());
    }
    std::vector<std::vector<int>> p1_preds(game.p1_nodes.size()); // P1 node -> P2 predecessors
    std::deque<int> p2_queue;
    for (std::size_t i = 0; i < game.p2_nodes.size(); ++i) {
        for (int succ : game.p2_nodes[i].succs) {
            if (succ == SafetyGame::kSink) {
                if (!p2_attracted[i]) {
                    p2_attracted[i] = true;
                    p2_queue.push_back(static_cast<int>(i));
                }
            } else {
                p1_preds[succ].push_back(static_cast<int>(i));
            }
        }
    }
    while (!p2_queue.empty()) {
        int const p2 = p2_queue.front();
        p2_queue.pop_front();
        int const p1 = game.p2_nodes[p2].source;
        if (p1_attracted[p1]) {
            continue;
        }
        if (--p1_pending[p1] == 0) {
            p1_attracted[p1] = true;
            for (int pred : p1_preds[p1]) {
                if (!p2_attracted[pred]) {
                    p2_attracted[pred] = true;
                    p2_queue.push_back(pred);
                }
            }
        }
    }
    std::vector<bool> safe(game.p1_nodes.size());
    for (std::size_t i = 0; i < game.p1_nodes.size(); ++i) {
        safe[i] = !p1_attracted[i];
    }
    return safe;
}

bool positiveSafety(Pomdp const& pomdp, std::set<Support> const& avoid, Support const& from,
                    long node_cap) {
    if (avoid.count(from)) {
        throw std::invalid_argument("positiveSafety requires the start support outside the avoid set");
    }
    auto candidates = safeReachable(pomdp, avoid, {from}, node_cap);
    return winningEscape(pomdp, avoid, candidates, node_cap).has_value();
}

std::pair<bool, std::optional<WeakWitness>> isWeaklyRevealing(Pomdp const& pomdp, long node_cap,
                                                              bool parallel) {
    auto const sing = singletonSet(pomdp);
    BeliefMdp belief = buildBeliefMdp(pomdp, node_cap);

    // A non-singleton start can escape before any revelation happens at all.
    if (!pomdp.initial_support.isSingleton()) {
        auto candidates = safeReachable(pomdp, sing, {pomdp.initial_support}, node_cap);
        if (auto escape = winningEscape(pomdp, sing, candidates, node_cap)) {
            return {false, WeakWitness{pomdp.initial_support, *escape}};
        }
    }

    auto singles = reachableSingletons(belief);
    int const count = static_cast<int>(singles.size());
    std::vector<std::optional<Support>> escapes(count);
#ifdef _OPENMP
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < count; ++i) {
            escapes[i] =
                singletonEscape(pomdp, sing, belief.nodes[singles[i]].members().front(), node_cap);
        }
    } else
#endif
    {
        (void)parallel;
        for (int i = 0; i < count; ++i) {
            escapes[i] =
                singletonEscape(pomdp, sing, belief.nodes[singles[i]].members().front(), node_cap);
        }
    }
    // Deterministic merge: smallest node index wins.
    for (int i = 0; i < count; ++i) {
        if (escapes[i]) {
            return {false, WeakWitness{belief.nodes[singles[i]], *escapes[i]}};
        }
    }
    return {true, std::nullopt};
}

RevealingVerdict classifyRevealing(Pomdp const& pomdp, long node_cap) {
    RevealingVerdict verdict;
    auto [strongly, counterexample] = isStronglyRevealing(pomdp);
    verdict.strongly = strongly;
    verdict.strong_counterexample = counterexample;
    auto [weakly, witness] = isWeaklyRevealing(pomdp, node_cap);
    verdict.weakly = weakly;
    verdict.weak_witness = witness;
    return verdict;
}

} // namespace reveal
