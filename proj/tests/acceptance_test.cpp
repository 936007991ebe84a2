// Runs the shipped acceptance suite and prints one line per criterion.
// Usage: acceptance_test [--config file] [--only N]... [--workers W]

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>

#include "recur2d/acceptance.hpp"
#include "recur2d/error.hpp"

int main(int argc, char** argv) {
    using namespace recur2d;
    std::string config_path;
    RunOptions opts;
    unsigned workers = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) config_path = argv[++i];
        else if (a == "--only" && i + 1 < argc) opts.only.push_back(std::atoi(argv[++i]));
        else if (a == "--workers" && i + 1 < argc) workers = static_cast<unsigned>(std::atoi(argv[++i]));
        else {
            std::cerr << "usage: acceptance_test [--config file] [--only N]... [--workers W]\n";
            return 2;
        }
    }
    try {
        ExperimentConfig cfg = config_path.empty() ? parse_config(default_acceptance_config()) : load_config(config_path);
        if (workers > 0) cfg.workers = workers;
        const RunResult r = run_experiment(cfg, opts);
        for (const auto& c : r.criteria)
            std::cout << "criterion " << c.id << ": " << (c.pass ? "PASS" : "FAIL") << "  " << c.title << "  (" << c.detail
                      << ")\n";
        return r.passed() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
