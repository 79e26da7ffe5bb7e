#include "reveal/mdp_solve.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace reveal {

namespace {

// Iterative Tarjan SCC over an adjacency list; returns per-node component ids.
struct SccResult {
    std::vector<int> comp; // node -> component id
    int count = 0;
};

SccResult tarjan(std::vector<std::vector<int>> const& adj) {
    int const n = static_cast<int>(adj.size());
    SccResult result;
    result.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) {
            continue;
        }
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.edge < adj[f.node].size()) {
                int to = adj[f.node][f.edge++];
                if (index[to] < 0) {
                    index[to] = low[to] = next_index++;
                    stack.push_back(to);
                    on_stack[to] = true;
                    frames.push_back({to, 0});
                } else if (on_stack[to]) {
                    low[f.node] = std::min(low[f.node], index[to]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    int id = result.count++;
                    while (true) {
                        int v = stack.back();
                        stack.pop_back();
                        on_stack[v] = false;
                        result.comp[v] = id;
                        if (v == f.node) {
                            break;
                        }
                    }
                }
                int done = f.node;
                frames.pop_back();
                if (!frames.empty()) {
                    low[frames.back().node] = std::min(low[frames.back().node], low[done]);
                }
            }
        }
    }
    return result;
}

} // namespace

std::vector<EndComponent> mecDecomposition(Mdp const& mdp) {
    int const n = mdp.state_count;
    // allowed[q] = retained actions; prune actions whose successors leave the
    // state's current SCC until a fixpoint.
    std::vector<std::vector<int>> allowed(n);
    std::vector<bool> alive(n, false);
    for (int q = 0; q < n; ++q) {
        for (int a = 0; a < mdp.action_count; ++a) {
            if (!mdp.row(q, a).empty()) {
                allowed[q].push_back(a);
            }
        }
        alive[q] = !allowed[q].empty();
    }

    SccResult scc;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<int>> adj(n);
        for (int q = 0; q < n; ++q) {
            if (!alive[q]) {
                continue;
            }
            for (int a : allowed[q]) {
                for (auto const& e : mdp.row(q, a)) {
                    adj[q].push_back(e.next);
                }
            }
        }
        scc = tarjan(adj);
        for (int q = 0; q < n; ++q) {
            if (!alive[q]) {
                continue;
            }
            auto bad = [&](int a) {
                for (auto const& e : mdp.row(q, a)) {
                    if (!alive[e.next] || scc.comp[e.next] != scc.comp[q]) {
                        return true;
                    }
                }
                return false;
            };
            auto it = std::remove_if(allowed[q].begin(), allowed[q].end(), bad);
            if (it != allowed[q].end()) {
                allowed[q].erase(it, allowed[q].end());
                changed = true;
            }
            if (allowed[q].empty()) {
                alive[q] = false;
                changed = true;
            }
        }
    }

    // Surviving SCCs (of alive states) are the MECs.
    std::vector<std::vector<int>> members(scc.count);
    for (int q = 0; q < n; ++q) {
        if (alive[q]) {
            members[scc.comp[q]].push_back(q);
        }
    }
    std::vector<EndComponent> mecs;
    for (auto& states : members) {
        if (states.empty()) {
            continue;
        }
        EndComponent ec;
        std::sort(states.begin(), states.end());
        ec.states = states;
        for (int q : ec.states) {
            ec.actions.push_back(allowed[q]);
        }
        mecs.push_back(std::move(ec));
    }
    std::sort(mecs.begin(), mecs.end(),
              [](EndComponent const& x, EndComponent const& y) {
                  return x.states.front() < y.states.front();
              });
    return mecs;
}

SolveResult almostSureReach(Mdp const& mdp, std::vector<int> const& target) {
    int const n = mdp.state_count;
    std::vector<bool> is_target(n, false);
    for (int q : target) {
        is_target[q] = true;
    }

    std::vector<bool> in_w(n, true);
    std::vector<int> dist(n, -1);
    std::vector<int> pick(n, -1);

    while (true) {
        // Backward BFS from the target through actions that stay inside W.
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(pick.begin(), pick.end(), -1);
        std::deque<int> queue;
        for (int q = 0; q < n; ++q) {
            if (is_target[q]) {
                dist[q] = 0;
                queue.push_back(q);
            }
        }
        auto allowed = [&](int q, int a) {
            auto const& row = mdp.row(q, a);
            if (row.empty()) {
                return false;
            }
            for (auto const& e : row) {
                if (!in_w[e.next]) {
                    return false;
                }
            }
            return true;
        };
        // Layered expansion keeps the shortest-path property for the strategy.
        std::vector<bool> reached = is_target;
        while (!queue.empty()) {
            int node = queue.front();
            queue.pop_front();
            for (int q = 0; q < n; ++q) {
                if (reached[q] || !in_w[q]) {
                    continue;
                }
                for (int a = 0; a < mdp.action_count; ++a) {
                    if (!allowed(q, a)) {
                        continue;
                    }
                    bool hits = false;
                    for (auto const& e : mdp.row(q, a)) {
                        if (e.next == node) {
                            hits = true;
                            break;
                        }
                    }
                    if (hits) {
                        reached[q] = true;
                        dist[q] = dist[node] + 1;
                        pick[q] = a;
                        queue.push_back(q);
                        break;
                    }
                }
            }
        }
        bool shrunk = false;
        for (int q = 0; q < n; ++q) {
            if (in_w[q] && !reached[q]) {
                in_w[q] = false;
                shrunk = true;
            }
        }
        if (!shrunk) {
            break;
        }
    }

    SolveResult result;
    for (int q = 0; q < n; ++q) {
        if (!in_w[q]) {
            continue;
        }
        result.winning.push_back(q);
        if (is_target[q]) {
            // Objective met on arrival; prefer an action that stays in W.
            int choice = -1;
            for (int a = 0; a < mdp.action_count && choice < 0; ++a) {
                auto const& row = mdp.row(q, a);
                if (row.empty()) {
                    continue;
                }
                bool stays = true;
                for (auto const& e : row) {
                    stays = stays && in_w[e.next];
                }
                if (stays) {
                    choice = a;
                }
            }
            if (choice < 0) {
                for (int a = 0; a < mdp.action_count && choice < 0; ++a) {
                    if (!mdp.row(q, a).empty()) {
                        choice = a;
                    }
                }
            }
            result.strategy[q] = std::max(choice, 0);
        } else {
            result.strategy[q] = pick[q];
        }
    }
    return result;
}

SolveResult almostSureParity(Mdp const& mdp, std::vector<int> const& priorities) {
    // A state is in a winning end component iff, for some even priority d, it
    // lies in a MEC of the sub-MDP restricted to priorities <= d that contains
    // a priority-d state (that MEC then has even maximal priority d). Winning
    // ECs can be strict sub-MDPs of full-MDP MECs, so each even level gets its
    // own decomposition.
    int max_pri = 0;
    for (int p : priorities) {
        max_pri = std::max(max_pri, p);
    }

    std::vector<int> target;
    std::map<int, int> ec_strategy; // state -> action; smallest even level wins
    for (int d = 0; d <= max_pri; d += 2) {
        Mdp sub = mdp;
        for (int q = 0; q < mdp.state_count; ++q) {
            for (int a = 0; a < mdp.action_count; ++a) {
                bool keep = priorities[q] <= d;
                for (auto const& e : mdp.row(q, a)) {
                    keep = keep && priorities[e.next] <= d;
                }
                if (!keep) {
                    sub.row(q, a).clear();
                }
            }
        }
        for (auto const& mec : mecDecomposition(sub)) {
            int anchor = -1;
            for (int q : mec.states) {
                if (priorities[q] == d) {
                    anchor = q;
                    break;
                }
            }
            if (anchor < 0) {
                continue; // maximal priority in this MEC is below d (and even
                          // levels below d were already handled)
            }
            std::map<int, std::vector<int> const*> actions_of;
            for (std::size_t i = 0; i < mec.states.size(); ++i) {
                actions_of[mec.states[i]] = &mec.actions[i];
            }
            // Backward BFS from the anchor through MEC-internal actions, so
            // the anchor is revisited almost surely.
            std::map<int, int> dist, pick;
            dist[anchor] = 0;
            std::deque<int> queue{anchor};
            while (!queue.empty()) {
                int node = queue.front();
                queue.pop_front();
                for (int q : mec.states) {
                    if (dist.count(q)) {
                        continue;
                    }
                    for (int a : *actions_of[q]) {
                        bool hits = false;
                        for (auto const& e : sub.row(q, a)) {
                            if (e.next == node) {
                                hits = true;
                                break;
                            }
                        }
                        if (hits) {
                            dist[q] = dist[node] + 1;
                            pick[q] = a;
                            queue.push_back(q);
                            break;
                        }
                    }
                }
            }
            for (int q : mec.states) {
                int action = q == anchor ? actions_of[q]->front() : pick.at(q);
                if (ec_strategy.emplace(q, action).second) {
                    target.push_back(q);
                }
            }
        }
    }
    std::sort(target.begin(), target.end());

    SolveResult result = almostSureReach(mdp, target);
    // Once inside a winning EC, switch from the reach strategy to cycling.
    for (auto const& [q, action] : ec_strategy) {
        result.strategy[q] = action;
    }
    return result;
}

std::vector<int> bruteForceParityOracle(Mdp const& mdp, std::vector<int> const& priorities) {
    int const n = mdp.state_count;
    if (n > 12 || mdp.action_count > 4) {
        throw std::invalid_argument("brute-force oracle capped at 12 states / 4 actions");
    }
    std::vector<std::vector<int>> available(n);
    for (int q = 0; q < n; ++q) {
        for (int a = 0; a < mdp.action_count; ++a) {
            if (!mdp.row(q, a).empty()) {
                available[q].push_back(a);
            }
        }
        if (available[q].empty()) {
            throw std::invalid_argument("brute-force oracle requires a total MDP");
        }
    }

    std::vector<bool> winning(n, false);
    std::vector<int> counter(n, 0);
    while (true) {
        // Induced chain of the current strategy.
        std::vector<std::vector<int>> adj(n);
        for (int q = 0; q < n; ++q) {
            for (auto const& e : mdp.row(q, available[q][counter[q]])) {
                adj[q].push_back(e.next);
            }
        }
        auto scc = tarjan(adj);
        // A component is bottom iff no edge leaves it.
        std::vector<bool> bottom(scc.count, true);
        std::vector<int> comp_max(scc.count, 0);
        for (int q = 0; q < n; ++q) {
            comp_max[scc.comp[q]] = std::max(comp_max[scc.comp[q]], priorities[q]);
            for (int to : adj[q]) {
                if (scc.comp[to] != scc.comp[q]) {
                    bottom[scc.comp[q]] = false;
                }
            }
        }
        // A state wins under this strategy iff it cannot reach a bad BSCC.
        std::vector<bool> doomed(n, false);
        for (int q = 0; q < n; ++q) {
            if (bottom[scc.comp[q]] && comp_max[scc.comp[q]] % 2 == 1) {
                doomed[q] = true;
            }
        }
        bool grew = true;
        while (grew) {
            grew = false;
            for (int q = 0; q < n; ++q) {
                if (doomed[q]) {
                    continue;
                }
                for (int to : adj[q]) {
                    if (doomed[to]) {
                        doomed[q] = true;
                        grew = true;
                        break;
                    }
                }
            }
        }
        for (int q = 0; q < n; ++q) {
            winning[q] = winning[q] || !doomed[q];
        }

        int pos = 0;
        while (pos < n && counter[pos] + 1 == static_cast<int>(available[pos].size())) {
            counter[pos] = 0;
            ++pos;
        }
        if (pos == n) {
            break;
        }
        ++counter[pos];
    }

    std::vector<int> out;
    for (int q = 0; q < n; ++q) {
        if (winning[q]) {
            out.push_back(q);
        }
    }
    return out;
}

} // namespace reveal
