#include "reveal/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace reveal {

namespace {

constexpr double kRowSumTolerance = 1e-6;

void checkIndex(int value, int bound, char const* what) {
    if (value < 0 || value >= bound) {
        std::ostringstream msg;
        msg << "unknown " << what << " index " << value;
        throw std::out_of_range(msg.str());
    }
}

} // namespace

Support Support::of(std::vector<int> states) {
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    Support s;
    s.members_ = std::move(states);
    return s;
}

Support Support::singleton(int state) {
    Support s;
    s.members_ = {state};
    return s;
}

bool Support::contains(int state) const {
    return std::binary_search(members_.begin(), members_.end(), state);
}

bool Support::subsetOf(Support const& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
}

std::size_t SupportHash::operator()(Support const& s) const {
    std::size_t h = 14695981039346656037ULL;
    for (int q : s.members()) {
        h ^= static_cast<std::size_t>(q) + 0x9e3779b97f4a7c15ULL;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string toString(Support const& s, std::vector<std::string> const& names) {
    std::string out = "{";
    bool first = true;
    for (int q : s.members()) {
        if (!first) {
            out += ",";
        }
        first = false;
        out += names[q];
    }
    out += "}";
    return out;
}

std::vector<TransitionEntry> const& Pomdp::row(int state, int action) const {
    checkIndex(state, stateCount(), "state");
    checkIndex(action, actionCount(), "action");
    return rows[static_cast<std::size_t>(state) * actionCount() + action];
}

std::vector<TransitionEntry>& Pomdp::row(int state, int action) {
    checkIndex(state, stateCount(), "state");
    checkIndex(action, actionCount(), "action");
    return rows[static_cast<std::size_t>(state) * actionCount() + action];
}

int Pomdp::maxPriority() const {
    int d = 0;
    for (int p : priorities) {
        d = std::max(d, p);
    }
    return d;
}

void Pomdp::syncInitialSupport() {
    std::vector<int> states;
    for (int q = 0; q < stateCount(); ++q) {
        if (q < static_cast<int>(initial_distribution.size()) && initial_distribution[q] > 0.0) {
            states.push_back(q);
        }
    }
    initial_support = Support::of(std::move(states));
}

namespace {

int indexOf(std::vector<std::string> const& names, std::string const& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

} // namespace

int Pomdp::stateIndex(std::string const& name) const { return indexOf(state_names, name); }
int Pomdp::actionIndex(std::string const& name) const { return indexOf(action_names, name); }
int Pomdp::signalIndex(std::string const& name) const { return indexOf(signal_names, name); }

std::vector<MdpEntry> const& Mdp::row(int state, int action) const {
    checkIndex(state, state_count, "state");
    checkIndex(action, action_count, "action");
    return rows[static_cast<std::size_t>(state) * action_count + action];
}

std::vector<MdpEntry>& Mdp::row(int state, int action) {
    checkIndex(state, state_count, "state");
    checkIndex(action, action_count, "action");
    return rows[static_cast<std::size_t>(state) * action_count + action];
}

std::vector<std::string> validate(Pomdp const& pomdp) {
    std::vector<std::string> violations;
    auto complain = [&](std::string const& msg) { violations.push_back(msg); };

    if (pomdp.stateCount() == 0) {
        complain("no states");
        return violations;
    }
    if (pomdp.actionCount() == 0) {
        complain("no actions");
    }
    if (pomdp.signalCount() == 0) {
        complain("no signals");
    }
    for (auto const* names : {&pomdp.state_names, &pomdp.action_names, &pomdp.signal_names}) {
        std::set<std::string> seen;
        for (auto const& n : *names) {
            if (!seen.insert(n).second) {
                complain("duplicate identifier '" + n + "'");
            }
        }
    }
    if (static_cast<int>(pomdp.priorities.size()) != pomdp.stateCount()) {
        complain("priorities must cover every state");
    } else {
        for (int q = 0; q < pomdp.stateCount(); ++q) {
            if (pomdp.priorities[q] < 0) {
                complain("negative priority on state " + pomdp.state_names[q]);
            }
        }
    }
    if (pomdp.rows.size() !=
        static_cast<std::size_t>(pomdp.stateCount()) * std::max(pomdp.actionCount(), 0)) {
        complain("transition table has wrong shape");
        return violations;
    }

    for (int q = 0; q < pomdp.stateCount(); ++q) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            auto const& row = pomdp.row(q, a);
            std::string where = "(" + pomdp.state_names[q] + ", " + pomdp.action_names[a] + ")";
            if (row.empty()) {
                complain("row " + where + " has no entries");
                continue;
            }
            double sum = 0.0;
            std::set<std::pair<int, int>> keys;
            for (auto const& e : row) {
                if (e.prob <= 0.0) {
                    complain("row " + where + " stores a non-positive probability");
                }
                if (e.signal < 0 || e.signal >= pomdp.signalCount() || e.next < 0 ||
                    e.next >= pomdp.stateCount()) {
                    complain("row " + where + " references an unknown signal or state");
                    continue;
                }
                if (!keys.insert({e.signal, e.next}).second) {
                    complain("row " + where + " duplicates key (" + pomdp.signal_names[e.signal] +
                             ", " + pomdp.state_names[e.next] + ")");
                }
                sum += e.prob;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                std::ostringstream msg;
                msg << "row " << where << " sum " << sum << " != 1";
                complain(msg.str());
            }
        }
    }

    if (static_cast<int>(pomdp.initial_distribution.size()) != pomdp.stateCount()) {
        complain("initial distribution must cover every state");
    } else {
        double sum = 0.0;
        std::vector<int> positive;
        for (int q = 0; q < pomdp.stateCount(); ++q) {
            double p = pomdp.initial_distribution[q];
            if (p < 0.0) {
                complain("negative initial mass on state " + pomdp.state_names[q]);
            }
            if (p > 0.0) {
                positive.push_back(q);
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            std::ostringstream msg;
            msg << "initial distribution sum " << sum << " != 1";
            complain(msg.str());
        }
        if (Support::of(positive) != pomdp.initial_support) {
            complain("initial support does not match the initial distribution");
        }
    }
    return violations;
}

Mdp underlyingMdp(Pomdp const& pomdp) {
    bool const dirac = pomdp.initial_support.isSingleton();
    Mdp mdp;
    mdp.state_count = pomdp.stateCount() + (dirac ? 0 : 1);
    mdp.action_count = pomdp.actionCount();
    mdp.rows.resize(static_cast<std::size_t>(mdp.state_count) * mdp.action_count);
    mdp.priorities.assign(pomdp.priorities.begin(), pomdp.priorities.end());
    mdp.state_names = pomdp.state_names;

    for (int q = 0; q < pomdp.stateCount(); ++q) {
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            std::vector<double> mass(pomdp.stateCount(), 0.0);
            for (auto const& e : pomdp.row(q, a)) {
                mass[e.next] += e.prob;
            }
            auto& row = mdp.row(q, a);
            for (int next = 0; next < pomdp.stateCount(); ++next) {
                if (mass[next] > 0.0) {
                    row.push_back({next, mass[next]});
                }
            }
        }
    }

    if (dirac) {
        mdp.initial_state = pomdp.initial_support.members().front();
    } else {
        // Fresh pre-initial state branching per the start distribution.
        int const pre = pomdp.stateCount();
        mdp.initial_state = pre;
        mdp.priorities.push_back(0);
        mdp.state_names.push_back("@start");
        for (int a = 0; a < pomdp.actionCount(); ++a) {
            auto& row = mdp.row(pre, a);
            for (int q = 0; q < pomdp.stateCount(); ++q) {
                if (pomdp.initial_distribution[q] > 0.0) {
                    row.push_back({q, pomdp.initial_distribution[q]});
                }
            }
        }
    }
    return mdp;
}

std::vector<int> succ(Pomdp const& pomdp, int state, int action) {
    std::vector<int> out;
    for (auto const& e : pomdp.row(state, action)) {
        out.push_back(e.next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<int> succWithSignal(Pomdp const& pomdp, int state, int action, int signal) {
    checkIndex(signal, pomdp.signalCount(), "signal");
    std::vector<int> out;
    for (auto const& e : pomdp.row(state, action)) {
        if (e.signal == signal) {
            out.push_back(e.next);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string serializeMdp(Mdp const& mdp) {
    std::ostringstream out;
    out << "mdp\n";
    out << "states: " << mdp.state_count << "\n";
    out << "actions: " << mdp.action_count << "\n";
    out << "init: " << mdp.initial_state << "\n";
    if (!mdp.priorities.empty()) {
        out << "priorities:";
        for (int p : mdp.priorities) {
            out << " " << p;
        }
        out << "\n";
    }
    char buf[64];
    for (int q = 0; q < mdp.state_count; ++q) {
        for (int a = 0; a < mdp.action_count; ++a) {
            auto const& row = mdp.row(q, a);
            if (row.empty()) {
                continue;
            }
            out << q << " " << a << " :";
            for (auto const& e : row) {
                std::snprintf(buf, sizeof(buf), "%.17g", e.prob);
                out << " " << e.next << ":" << buf;
            }
            out << "\n";
        }
    }
    return out.str();
}

} // namespace reveal
