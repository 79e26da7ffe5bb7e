#include "reveal/belief.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace reveal {

NodeCapError::NodeCapError(long cap)
    : std::runtime_error("belief-support exploration exceeded the node cap of " +
                         std::to_string(cap)) {}

std::vector<BeliefEdge> const& BeliefMdp::out(int node, int action) const {
    return edges[static_cast<std::size_t>(node) * action_count + action];
}

int BeliefMdp::nodeOf(Support const& s) const {
    for (int i = 0; i < nodeCount(); ++i) {
        if (nodes[i] == s) {
            return i;
        }
    }
    return -1;
}

std::optional<Support> update(Pomdp const& pomdp, Support const& support, int action, int signal) {
    std::vector<bool> hit(pomdp.stateCount(), false);
    for (int q : support.members()) {
        for (auto const& e : pomdp.row(q, action)) {
            if (e.signal == signal) {
                hit[e.next] = true;
            }
        }
    }
    std::vector<int> members;
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        if (hit[q]) {
            members.push_back(q);
        }
    }
    if (members.empty()) {
        return std::nullopt;
    }
    return Support::of(std::move(members));
}

std::optional<Support> updateStar(Pomdp const& pomdp, Support support,
                                  std::vector<std::pair<int, int>> const& history) {
    for (auto const& [action, signal] : history) {
        auto next = update(pomdp, support, action, signal);
        if (!next) {
            return std::nullopt;
        }
        support = std::move(*next);
    }
    return support;
}

BeliefMdp buildBeliefMdp(Pomdp const& pomdp, long node_cap) {
    BeliefMdp belief;
    belief.action_count = pomdp.actionCount();

    std::unordered_map<Support, int, SupportHash> index;
    auto intern = [&](Support const& s) {
        auto it = index.find(s);
        if (it != index.end()) {
            return it->second;
        }
        if (static_cast<long>(belief.nodes.size()) >= node_cap) {
            throw NodeCapError(node_cap);
        }
        int id = static_cast<int>(belief.nodes.size());
        belief.nodes.push_back(s);
        index.emplace(s, id);
        return id;
    };

    intern(pomdp.initial_support);
    for (std::size_t head = 0; head < belief.nodes.size(); ++head) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            // successor support -> signals producing it, in signal index order
            std::map<int, std::vector<int>> by_target;
            for (int s = 0; s < pomdp.signalCount(); ++s) {
                auto next = update(pomdp, belief.nodes[head], a, s);
                if (next) {
                    by_target[intern(*next)].push_back(s);
                }
            }
            std::vector<BeliefEdge> out;
            for (auto& [target, signals] : by_target) {
                out.push_back({target, std::move(signals)});
            }
            belief.edges.push_back(std::move(out));
        }
    }
    belief.priorities = liftPriorities(pomdp, belief);
    return belief;
}

std::vector<int> liftPriorities(Pomdp const& pomdp, BeliefMdp const& belief) {
    std::vector<int> out;
    out.reserve(belief.nodes.size());
    for (auto const& node : belief.nodes) {
        int pri = 0;
        for (int q : node.members()) {
            pri = std::max(pri, pomdp.priorities[q]);
        }
        out.push_back(pri);
    }
    return out;
}

std::vector<int> reachableSingletons(BeliefMdp const& belief) {
    std::vector<int> out;
    for (int i = 0; i < belief.nodeCount(); ++i) {
        if (belief.nodes[i].isSingleton()) {
            out.push_back(i);
        }
    }
    return out;
}

int revelationDistance(BeliefMdp const& belief, bool count_initial, int from_node) {
    if (count_initial && belief.nodes[from_node].isSingleton()) {
        return 0;
    }
    std::vector<int> dist(belief.nodeCount(), -1);
    std::deque<int> queue;
    dist[from_node] = 0;
    queue.push_back(from_node);
    while (!queue.empty()) {
        int node = queue.front();
        queue.pop_front();
        for (int a = 0; a < belief.action_count; ++a) {
            for (auto const& edge : belief.out(node, a)) {
                int d = dist[node] + 1;
                if (belief.nodes[edge.target].isSingleton()) {
                    return d; // BFS order: first singleton found is nearest
                }
                if (dist[edge.target] < 0) {
                    dist[edge.target] = d;
                    queue.push_back(edge.target);
                }
            }
        }
    }
    return kUnreachable;
}

Pomdp genExpFamily(int n) {
    if (n < 1) {
        throw std::invalid_argument("genExpFamily requires n >= 1");
    }
    Pomdp pomdp;
    pomdp.state_names.push_back("init");
    for (int i = 0; i <= n; ++i) {
        pomdp.state_names.push_back("q" + std::to_string(i));
    }
    pomdp.action_names.push_back("a");
    for (int j = 1; j <= n; ++j) {
        pomdp.signal_names.push_back("s" + std::to_string(j));
    }
    int const states = n + 2;
    pomdp.rows.resize(states);
    pomdp.priorities.assign(states, 0);
    pomdp.initial_distribution.assign(states, 0.0);
    pomdp.initial_distribution[0] = 1.0;
    pomdp.syncInitialSupport();

    // From init: every (signal, q_i) pair is possible.
    {
        auto& row = pomdp.rows[0];
        double const p = 1.0 / (static_cast<double>(n) * (n + 1));
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i <= n; ++i) {
                row.push_back({j, i + 1, p});
            }
        }
        std::sort(row.begin(), row.end(), [](auto const& x, auto const& y) {
            return std::tie(x.signal, x.next) < std::tie(y.signal, y.next);
        });
    }

    // From q_i on signal s_j: q0 always stays; for i >= 1, mass stays when
    // j < i, spreads over the smaller states when j = i, and spreads over all
    // states when j > i.
    for (int i = 0; i <= n; ++i) {
        auto& row = pomdp.rows[static_cast<std::size_t>(i + 1)];
        std::vector<std::pair<int, int>> positive; // (signal, next), both 0-based over q-states
        for (int j = 1; j <= n; ++j) {
            for (int k = 0; k <= n; ++k) {
                bool on = (i == 0 && k == 0) ||
                          (i >= 1 && ((i > j && i == k) || (i == j && i > k) || (i < j)));
                if (on) {
                    positive.push_back({j - 1, k + 1});
                }
            }
        }
        double const p = 1.0 / static_cast<double>(positive.size());
        for (auto const& [sig, next] : positive) {
            row.push_back({sig, next, p});
        }
    }
    return pomdp;
}

Mdp beliefToMdp(BeliefMdp const& belief) {
    Mdp mdp;
    mdp.state_count = belief.nodeCount();
    mdp.action_count = belief.action_count;
    mdp.rows.resize(static_cast<std::size_t>(mdp.state_count) * mdp.action_count);
    mdp.priorities = belief.priorities;
    mdp.initial_state = 0;
    for (int node = 0; node < mdp.state_count; ++node) {
        for (int a = 0; a < mdp.action_count; ++a) {
            auto const& out = belief.out(node, a);
            auto& row = mdp.row(node, a);
            for (auto const& edge : out) {
                row.push_back({edge.target, 1.0 / static_cast<double>(out.size())});
            }
        }
    }
    return mdp;
}

std::string beliefMdpToDot(BeliefMdp const& belief, Pomdp const& pomdp) {
    std::ostringstream out;
    out << "digraph belief {\n";
    for (int i = 0; i < belief.nodeCount(); ++i) {
        out << "  n" << i << " [label=\"" << toString(belief.nodes[i], pomdp.state_names) << ":"
            << belief.priorities[i] << "\"];\n";
    }
    for (int i = 0; i < belief.nodeCount(); ++i) {
        for (int a = 0; a < belief.action_count; ++a) {
            for (auto const& edge : belief.out(i, a)) {
                out << "  n" << i << " -> n" << edge.target << " [label=\""
                    << pomdp.action_names[a] << "/";
                for (std::size_t s = 0; s < edge.signals.size(); ++s) {
                    out << (s ? "," : "") << pomdp.signal_names[edge.signals[s]];
                }
                out << "\"];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace reveal
