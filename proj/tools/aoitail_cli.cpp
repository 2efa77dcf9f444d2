// Command-line front end: computes violation-probability bounds, solves the
// two rate-optimization problems, and runs the tandem-queue simulator over
// parameter sweeps, emitting CSV or JSON tables.
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aoitail/cli_commands.hpp"
#include "aoitail/errors.hpp"
#include "aoitail/run_config.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_path;
    std::string format;
    std::int64_t seed = -1;
    int jobs = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Key = value configuration file");
    cmd->add_option("--set", args.overrides, "Override one config key (key=value), repeatable");
    cmd->add_option("--output", args.output_path, "Output file (default: stdout)");
    cmd->add_option("--format", args.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--seed", args.seed, "Simulation seed");
    cmd->add_option("--jobs", args.jobs, "Worker threads for sweep points");
}

aoitail::RunConfig build_config(const CommonArgs& args) {
    aoitail::RunConfig run = args.config_path.empty()
                                 ? aoitail::RunConfig::defaults()
                                 : aoitail::parse_config_file(args.config_path);
    for (const std::string& assignment : args.overrides) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw aoitail::ConfigError("--set expects key=value, got '" + assignment + "'");
        run.set(assignment.substr(0, eq), assignment.substr(eq + 1));
    }
    if (!args.output_path.empty()) run.output_path = args.output_path;
    if (!args.format.empty()) run.format = args.format;
    if (args.seed >= 0) run.seed = static_cast<std::uint64_t>(args.seed);
    if (args.jobs > 0) run.jobs = args.jobs;
    run.resolve();
    return run;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information violation bounds, rate optimization, and simulation"};
    app.require_subcommand(1);

    CommonArgs bound_args, optimize_args, simulate_args, compare_args;
    CLI::App* bound = app.add_subcommand(
        "bound", "Bound the violation probability across a parameter sweep");
    add_common_flags(bound, bound_args);
    CLI::App* optimize = app.add_subcommand(
        "optimize", "Solve both rate-optimization problems for the configured system");
    add_common_flags(optimize, optimize_args);
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Estimate the violation probability by discrete-event simulation");
    add_common_flags(simulate, simulate_args);
    CLI::App* compare = app.add_subcommand(
        "compare", "Simulate all three buffer policies across the sweep");
    add_common_flags(compare, compare_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (bound->parsed()) return aoitail::cmd_bound(build_config(bound_args));
        if (optimize->parsed()) return aoitail::cmd_optimize(build_config(optimize_args));
        if (simulate->parsed()) return aoitail::cmd_simulate(build_config(simulate_args));
        if (compare->parsed()) return aoitail::cmd_compare(build_config(compare_args));
    } catch (const aoitail::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aoitail::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
