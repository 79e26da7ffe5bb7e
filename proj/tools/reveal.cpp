#include "reveal/belief.hpp"
#include "reveal/cassandra.hpp"
#include "reveal/mdp_solve.hpp"
#include "reveal/model.hpp"
#include "reveal/pipeline.hpp"
#include "reveal/revelation.hpp"
#include "reveal/sim.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidModel = 1;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;
constexpr int kExitResourceCap = 70;

struct Bail {
    int code;
};

long nodeCap() {
    if (char const* env = std::getenv("REVEAL_NODE_CAP")) {
        long cap = std::atol(env);
        if (cap > 0) {
            return cap;
        }
    }
    return reveal::kDefaultNodeCap;
}

reveal::Pomdp load(std::string const& path) {
    reveal::Pomdp pomdp = reveal::parsePomdpFile(path);
    auto violations = reveal::validate(pomdp);
    if (!violations.empty()) {
        for (auto const& v : violations) {
            std::cerr << path << ": " << v << "\n";
        }
        throw Bail{kExitInvalidModel};
    }
    return pomdp;
}

void writeOut(std::string const& path, std::string const& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write '" << path << "'\n";
        throw Bail{kExitUsage};
    }
    out << content;
}

nlohmann::ordered_json supportJson(reveal::Support const& s,
                                   std::vector<std::string> const& names) {
    auto arr = nlohmann::ordered_json::array();
    for (int q : s.members()) {
        arr.push_back(names[q]);
    }
    return arr;
}

int cmdValidate(std::string const& file) {
    reveal::Pomdp pomdp = reveal::parsePomdpFile(file);
    auto violations = reveal::validate(pomdp);
    for (auto const& v : violations) {
        std::cout << v << "\n";
    }
    return violations.empty() ? kExitOk : kExitInvalidModel;
}

int cmdClassify(std::string const& file) {
    auto pomdp = load(file);
    auto verdict = reveal::classifyRevealing(pomdp, nodeCap());
    nlohmann::ordered_json doc;
    doc["strongly_revealing"] = verdict.strongly;
    doc["weakly_revealing"] = verdict.weakly;
    if (verdict.strong_counterexample) {
        auto const& ce = *verdict.strong_counterexample;
        doc["strong_counterexample"] = {{"from", pomdp.state_names[ce.from]},
                                        {"action", pomdp.action_names[ce.action]},
                                        {"to", pomdp.state_names[ce.to]}};
    } else {
        doc["strong_counterexample"] = nullptr;
    }
    if (verdict.weak_witness) {
        doc["weak_witness"] = {
            {"singleton", supportJson(verdict.weak_witness->singleton, pomdp.state_names)},
            {"escape", supportJson(verdict.weak_witness->escape, pomdp.state_names)}};
    } else {
        doc["weak_witness"] = nullptr;
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int cmdSolve(std::string const& file, std::string const& strategy_out) {
    auto pomdp = load(file);
    auto verdict = reveal::solve(pomdp, nodeCap());
    nlohmann::ordered_json doc;
    doc["answer"] = reveal::toString(verdict.answer);
    doc["regime"] = reveal::toString(verdict.regime);
    doc["belief_mdp_winning"] = verdict.belief_mdp_winning;
    doc["belief_mdp_nodes"] = verdict.belief_mdp_nodes;
    std::cout << doc.dump(2) << "\n";
    if (!strategy_out.empty() && verdict.strategy) {
        writeOut(strategy_out, reveal::strategyToJson(pomdp, *verdict.strategy));
    }
    return kExitOk;
}

int cmdSimulate(std::string const& file, std::string const& strategy_path, int runs, int steps,
                std::uint64_t seed, std::string const& csv_out) {
    auto pomdp = load(file);
    std::optional<reveal::BeliefStrategy> strategy;
    if (!strategy_path.empty()) {
        std::ifstream in(strategy_path);
        if (!in) {
            std::cerr << "cannot open '" << strategy_path << "'\n";
            return kExitUsage;
        }
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        strategy = reveal::strategyFromJson(pomdp, text);
    }
    std::ofstream csv_file;
    std::ostream* csv = nullptr;
    if (!csv_out.empty()) {
        csv_file.open(csv_out);
        if (!csv_file) {
            std::cerr << "cannot write '" << csv_out << "'\n";
            return kExitUsage;
        }
        csv = &csv_file;
    }
    auto stats = reveal::batchSimulate(pomdp, strategy ? &*strategy : nullptr, runs, steps, seed,
                                       csv);
    std::cout << reveal::statsToJson(stats);
    return kExitOk;
}

int cmdTransformSr(std::string const& file, double eps, std::string const& out) {
    auto pomdp = load(file);
    writeOut(out, reveal::serializePomdp(reveal::transformSr(pomdp, eps)));
    return kExitOk;
}

int cmdExport(std::string const& file, bool belief_mdp, bool underlying, std::string const& out) {
    auto pomdp = load(file);
    if (belief_mdp == underlying) {
        std::cerr << "export needs exactly one of --belief-mdp or --underlying-mdp\n";
        return kExitUsage;
    }
    if (belief_mdp) {
        auto belief = reveal::buildBeliefMdp(pomdp, nodeCap());
        writeOut(out, reveal::beliefMdpToDot(belief, pomdp));
    } else {
        writeOut(out, reveal::serializeMdp(reveal::underlyingMdp(pomdp)));
    }
    return kExitOk;
}

int cmdGenExp(int n, std::string const& out) {
    writeOut(out, reveal::serializePomdp(reveal::genExpFamily(n)));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qualitative analysis of POMDPs with parity objectives"};
    app.require_subcommand(1);

    std::string file, out, strategy_path, csv_out, strategy_out;
    double eps = 0.1;
    int runs = 500, steps = 500, n = 2;
    std::uint64_t seed = 0;
    bool belief_mdp = false, underlying = false, dot = false;

    auto* validate = app.add_subcommand("validate", "Check a model file");
    validate->add_option("file", file)->required();

    auto* classify = app.add_subcommand("classify", "Report the revelation classification");
    classify->add_option("file", file)->required();

    auto* solve = app.add_subcommand("solve", "Decide almost-sure winning and extract a strategy");
    solve->add_option("file", file)->required();
    solve->add_option("--strategy-out", strategy_out, "Write the winning strategy as JSON");

    auto* simulate = app.add_subcommand("simulate", "Run seeded simulations and report the metric");
    simulate->add_option("file", file)->required();
    simulate->add_option("--strategy", strategy_path, "Strategy JSON (omit for uniform random)");
    simulate->add_option("--runs", runs);
    simulate->add_option("--steps", steps);
    simulate->add_option("--seed", seed);
    simulate->add_option("--csv-out", csv_out);

    auto* transform = app.add_subcommand("transform-sr", "Add occasional state-revealing signals");
    transform->add_option("file", file)->required();
    transform->add_option("--epsilon", eps)->check(CLI::Range(1e-9, 1.0 - 1e-9));
    transform->add_option("-o,--output", out);

    auto* exp = app.add_subcommand("export", "Export the belief MDP (DOT) or the underlying MDP");
    exp->add_option("file", file)->required();
    exp->add_flag("--belief-mdp", belief_mdp);
    exp->add_flag("--dot", dot, "DOT output (implied by --belief-mdp)");
    exp->add_flag("--underlying-mdp", underlying);
    exp->add_option("-o,--output", out);

    auto* gen = app.add_subcommand("gen-exp", "Generate the exponential-revelation family");
    gen->add_option("n", n)->required()->check(CLI::Range(1, 20));
    gen->add_option("-o,--output", out);

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (validate->parsed()) {
            return cmdValidate(file);
        }
        if (classify->parsed()) {
            return cmdClassify(file);
        }
        if (solve->parsed()) {
            return cmdSolve(file, strategy_out);
        }
        if (simulate->parsed()) {
            return cmdSimulate(file, strategy_path, runs, steps, seed, csv_out);
        }
        if (transform->parsed()) {
            return cmdTransformSr(file, eps, out);
        }
        if (exp->parsed()) {
            (void)dot; // DOT is the only belief-MDP format
            return cmdExport(file, belief_mdp, underlying, out);
        }
        if (gen->parsed()) {
            return cmdGenExp(n, out);
        }
    } catch (Bail const& b) {
        return b.code;
    } catch (reveal::ParseError const& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return kExitParse;
    } catch (reveal::NodeCapError const& e) {
        std::cerr << e.what() << "\n";
        return kExitResourceCap;
    } catch (std::exception const& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
