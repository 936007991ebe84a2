// Command-line front end: one subcommand per experiment kind.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "recur2d/acceptance.hpp"
#include "recur2d/experiment.hpp"

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::optional<unsigned> workers;
    std::vector<int> only;
    bool dump_default = false;
    bool quiet = false;
};

int run(const std::string& kind, const Common& c) {
    using namespace recur2d;
    Json doc = c.config_path.empty() ? default_config(kind) : Json();
    if (c.dump_default) {
        std::cout << default_config(kind).dump(2) << "\n";
        return 0;
    }
    ExperimentConfig config = c.config_path.empty() ? parse_config(doc) : load_config(c.config_path);
    if (config.kind != kind)
        throw Error(ErrorCode::ConfigInvalid, "$.kind: config is for '" + config.kind + "', subcommand is '" + kind + "'");
    if (c.seed) config.seed = *c.seed;
    if (c.workers) config.workers = *c.workers;

    RunOptions opts;
    opts.only = c.only;
    opts.log = c.quiet ? nullptr : &std::cerr;
    const RunResult result = run_experiment(config, opts);

    std::string dir = c.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("RECUR2D_OUTPUT_DIR");
        dir = env && *env ? env : "out/" + kind;
    }
    write_outputs(result, dir);

    for (const auto& cr : result.criteria)
        std::cout << "criterion " << cr.id << " " << (cr.pass ? "PASS" : "FAIL") << "  " << cr.title << ": " << cr.detail
                  << "\n";
    if (result.criteria.empty()) std::cout << result.summary.dump(2) << "\n";
    std::cout << "outputs written to " << dir << "\n";
    return result.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recurrence experiments for planar extensions of subshifts"};
    app.require_subcommand(1);
    Common common;
    std::string chosen;
    for (const auto& kind : recur2d::experiment_kinds()) {
        CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("-c,--config", common.config_path, "JSON config file (default: built-in)");
        sub->add_option("-s,--seed", common.seed, "override the master seed");
        sub->add_option("-o,--out", common.out_dir, "output directory (default: $RECUR2D_OUTPUT_DIR or out/<kind>)");
        sub->add_option("-w,--workers", common.workers, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_flag("--dump-default", common.dump_default, "print the built-in config and exit");
        sub->add_flag("-q,--quiet", common.quiet, "no progress lines");
        if (kind == "accept")
            sub->add_option("--only", common.only, "criteria to run (1-15)")->check(CLI::Range(1, recur2d::kCriterionCount));
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        return run(chosen, common);
    } catch (const recur2d::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == recur2d::ErrorCode::ConfigInvalid || e.code() == recur2d::ErrorCode::Io ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
