// Compares the serial and OpenMP-parallel batch simulation paths on the tiger
// model (or any model given on the command line) and checks they agree.
#include "reveal/cassandra.hpp"
#include "reveal/pipeline.hpp"
#include "reveal/sim.hpp"

#include <chrono>
#include <cstdio>
#include <string>

int main(int argc, char** argv) {
    std::string path = argc > 1 ? argv[1] : "data/tiger.pomdp";
    int runs = argc > 2 ? std::atoi(argv[2]) : 5000;
    int steps = argc > 3 ? std::atoi(argv[3]) : 500;

    reveal::Pomdp pomdp = reveal::parsePomdpFile(path);
    auto verdict = reveal::solve(pomdp);
    reveal::BeliefStrategy const* strategy =
        verdict.strategy ? &*verdict.strategy : nullptr;
    if (!strategy) {
        std::printf("no winning strategy; benchmarking the random baseline\n");
    }

    auto time = [&](bool parallel) {
        auto start = std::chrono::steady_clock::now();
        auto stats = reveal::batchSimulate(pomdp, strategy, runs, steps, 42, nullptr, parallel);
        auto end = std::chrono::steady_clock::now();
        double ms = std::chrono::duration<double, std::milli>(end - start).count();
        return std::pair<double, reveal::BatchStats>(ms, stats);
    };

    auto [serial_ms, serial_stats] = time(false);
    auto [parallel_ms, parallel_stats] = time(true);

    bool identical = serial_stats.mean_metric == parallel_stats.mean_metric &&
                     serial_stats.max_metric == parallel_stats.max_metric &&
                     serial_stats.reached == parallel_stats.reached;
    std::printf("%s: %d runs x %d steps\n", path.c_str(), runs, steps);
    std::printf("serial:   %8.1f ms\n", serial_ms);
    std::printf("parallel: %8.1f ms  (speedup %.2fx)\n", parallel_ms, serial_ms / parallel_ms);
    std::printf("results identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
