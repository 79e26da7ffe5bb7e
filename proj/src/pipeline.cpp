#include "reveal/pipeline.hpp"

#include "reveal/mdp_solve.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reveal {

char const* toString(Answer a) {
    switch (a) {
    case Answer::ExactYes:
        return "EXACT_YES";
    case Answer::ExactNo:
        return "EXACT_NO";
    case Answer::SoundYes:
        return "SOUND_YES";
    case Answer::Unknown:
        return "UNKNOWN";
    }
    return "UNKNOWN";
}

char const* toString(Regime r) {
    switch (r) {
    case Regime::Strong:
        return "STRONG";
    case Regime::Weak012:
        return "WEAK_012";
    case Regime::WeakHigh:
        return "WEAK_HIGH";
    case Regime::GeneralCobuchi:
        return "GENERAL_COBUCHI";
    case Regime::General:
        return "GENERAL";
    }
    return "GENERAL";
}

Answer decisionMatrix(Regime regime, bool belief_mdp_winning) {
    switch (regime) {
    case Regime::Strong:
    case Regime::Weak012:
        return belief_mdp_winning ? Answer::ExactYes : Answer::ExactNo;
    case Regime::WeakHigh:
        return belief_mdp_winning ? Answer::ExactYes : Answer::Unknown;
    case Regime::GeneralCobuchi:
        return belief_mdp_winning ? Answer::SoundYes : Answer::Unknown;
    case Regime::General:
        return Answer::Unknown;
    }
    return Answer::Unknown;
}

Verdict solve(Pomdp const& pomdp, long node_cap) {
    BeliefMdp belief = buildBeliefMdp(pomdp, node_cap);
    Mdp abstraction = beliefToMdp(belief);
    SolveResult parity = almostSureParity(abstraction, belief.priorities);

    Verdict verdict;
    verdict.belief_mdp_nodes = belief.nodeCount();
    verdict.belief_mdp_winning = std::binary_search(parity.winning.begin(), parity.winning.end(), 0);

    auto [strongly, strong_ce] = isStronglyRevealing(pomdp);
    if (strongly) {
        verdict.regime = Regime::Strong;
    } else {
        auto [weakly, witness] = isWeaklyRevealing(pomdp, node_cap);
        if (weakly) {
            verdict.regime = pomdp.maxPriority() <= 2 ? Regime::Weak012 : Regime::WeakHigh;
        } else {
            verdict.regime = pomdp.maxPriority() <= 1 ? Regime::GeneralCobuchi : Regime::General;
        }
    }
    verdict.answer = decisionMatrix(verdict.regime, verdict.belief_mdp_winning);

    if (verdict.answer == Answer::ExactYes || verdict.answer == Answer::SoundYes) {
        BeliefStrategy strategy;
        for (int node : parity.winning) {
            strategy.supports.push_back(belief.nodes[node]);
            strategy.actions.push_back(parity.strategy.at(node));
        }
        verdict.strategy = std::move(strategy);
    }
    return verdict;
}

Pomdp transformSr(Pomdp const& pomdp, double eps) {
    if (eps <= 0.0 || eps >= 1.0) {
        throw std::invalid_argument("epsilon must lie in (0, 1)");
    }
    Pomdp out = pomdp;
    // One fresh revealing signal per state; suffix until names are unique.
    std::vector<int> reveal_signal(pomdp.stateCount());
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        std::string name = "reveal-" + pomdp.state_names[q];
        while (std::find(out.signal_names.begin(), out.signal_names.end(), name) !=
               out.signal_names.end()) {
            name += "'";
        }
        reveal_signal[q] = static_cast<int>(out.signal_names.size());
        out.signal_names.push_back(name);
    }
    for (int q = 0; q < pomdp.stateCount(); ++q) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            std::map<std::pair<int, int>, double> mass;
            for (auto const& e : pomdp.row(q, a)) {
                double const moved = e.prob * eps;
                // p = (p - p*eps) + p*eps keeps row sums exactly unchanged.
                mass[{e.signal, e.next}] += e.prob - moved;
                mass[{reveal_signal[e.next], e.next}] += moved;
            }
            auto& row = out.row(q, a);
            row.clear();
            for (auto const& [key, p] : mass) {
                row.push_back({key.first, key.second, p});
            }
        }
    }
    return out;
}

Controller::Controller(Pomdp const& pomdp, BeliefStrategy const& strategy) : pomdp_(&pomdp) {
    for (std::size_t i = 0; i < strategy.supports.size(); ++i) {
        choice_.emplace(strategy.supports[i], strategy.actions[i]);
    }
    reset();
}

void Controller::reset() { current_ = pomdp_->initial_support; }

int Controller::act() const {
    auto it = choice_.find(current_);
    if (it == choice_.end()) {
        throw std::domain_error("support " + toString(current_, pomdp_->state_names) +
                                " is outside the strategy domain");
    }
    return it->second;
}

void Controller::observe(int action, int signal) {
    auto next = update(*pomdp_, current_, action, signal);
    if (!next) {
        throw std::runtime_error("inconsistent observation: signal " +
                                 pomdp_->signal_names[signal] + " cannot occur from " +
                                 toString(current_, pomdp_->state_names));
    }
    current_ = std::move(*next);
}

std::string strategyToJson(Pomdp const& pomdp, BeliefStrategy const& strategy) {
    nlohmann::ordered_json doc;
    doc["initial"] = nlohmann::json::array();
    for (int q : pomdp.initial_support.members()) {
        doc["initial"].push_back(pomdp.state_names[q]);
    }
    doc["choices"] = nlohmann::json::array();
    for (std::size_t i = 0; i < strategy.supports.size(); ++i) {
        nlohmann::ordered_json choice;
        choice["support"] = nlohmann::json::array();
        for (int q : strategy.supports[i].members()) {
            choice["support"].push_back(pomdp.state_names[q]);
        }
        choice["action"] = pomdp.action_names[strategy.actions[i]];
        doc["choices"].push_back(choice);
    }
    return doc.dump(2) + "\n";
}

BeliefStrategy strategyFromJson(Pomdp const& pomdp, std::string const& text) {
    auto doc = nlohmann::json::parse(text);
    BeliefStrategy strategy;
    for (auto const& choice : doc.at("choices")) {
        std::vector<int> members;
        for (auto const& name : choice.at("support")) {
            int q = pomdp.stateIndex(name.get<std::string>());
            if (q < 0) {
                throw std::runtime_error("strategy references unknown state '" +
                                         name.get<std::string>() + "'");
            }
            members.push_back(q);
        }
        int a = pomdp.actionIndex(choice.at("action").get<std::string>());
        if (a < 0) {
            throw std::runtime_error("strategy references an unknown action");
        }
        strategy.supports.push_back(Support::of(std::move(members)));
        strategy.actions.push_back(a);
    }
    return strategy;
}

} // namespace reveal
