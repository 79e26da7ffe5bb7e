#pragma once

#include "reveal/belief.hpp"
#include "reveal/model.hpp"
#include "reveal/revelation.hpp"
#include "reveal/support.hpp"

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace reveal {

enum class Answer { ExactYes, ExactNo, SoundYes, Unknown };

// STRONG: strongly revealing (belief analysis exact both ways).
// WEAK_012: weakly revealing, priorities <= 2 (exact both ways).
// WEAK_HIGH: weakly revealing, some priority >= 3 (YES exact, NO untrusted).
// GENERAL_COBUCHI: not weakly revealing, priorities <= 1 (YES sound, NO untrusted).
// GENERAL: anything else (belief verdict can be wrong in both directions).
enum class Regime { Strong, Weak012, WeakHigh, GeneralCobuchi, General };

char const* toString(Answer a);
char const* toString(Regime r);

// A pure memoryless strategy over belief supports, in BFS node order,
// defined exactly on the winning region of the belief-support MDP.
struct BeliefStrategy {
    std::vector<Support> supports;
    std::vector<int> actions; // parallel to supports
};

struct Verdict {
    Answer answer = Answer::Unknown;
    bool belief_mdp_winning = false;
    Regime regime = Regime::General;
    std::optional<BeliefStrategy> strategy; // present iff answer is a YES
    int belief_mdp_nodes = 0;
};

Answer decisionMatrix(Regime regime, bool belief_mdp_winning);

Verdict solve(Pomdp const& pomdp, long node_cap = kDefaultNodeCap);

// Adds one fresh signal per state; every transition keeps mass (1 - eps) on
// its original signal and moves mass eps to the signal revealing the target
// state. Row sums are preserved exactly; supports are eps-independent.
Pomdp transformSr(Pomdp const& pomdp, double eps = 0.1);

// Stateful executor of a belief strategy: tracks the current support through
// observed (action, signal) pairs and plays the strategy's choice.
class Controller {
public:
    Controller(Pomdp const& pomdp, BeliefStrategy const& strategy);

    void reset();
    int act() const;                      // throws std::domain_error outside the domain
    void observe(int action, int signal); // throws std::runtime_error on INCONSISTENT
    Support const& current() const { return current_; }

private:
    Pomdp const* pomdp_;
    std::unordered_map<Support, int, SupportHash> choice_;
    Support current_;
};

// Strategy file format: {"initial": [names], "choices": [{"support": [...], "action": name}]}.
std::string strategyToJson(Pomdp const& pomdp, BeliefStrategy const& strategy);
BeliefStrategy strategyFromJson(Pomdp const& pomdp, std::string const& text);

} // namespace reveal
