// ppbu: blow-up experiments for the radial pseudo-parabolic problem with variable exponent.
//
//   ppbu validate  --config run.ini
//   ppbu simulate  --config run.ini --out traj.csv
//   ppbu bounds    --config run.ini [--trajectory traj.csv] [--out report.json]
//   ppbu verify    --config run.ini
//   ppbu sweep     --config sweep.ini [--out sweep.csv]
//   ppbu constants --config run.ini

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ppbu/harness/commands.hpp"

int main(int argc, char** argv) {
    using namespace ppbu::harness;

    CLI::App app{"Blow-up simulation and time bounds for a pseudo-parabolic equation"};
    app.require_subcommand(1);

    CommandOptions opt;
    std::string out, trajectory;
    std::uint64_t seed = 0;

    auto common = [&](CLI::App* sub, bool with_trajectory) {
        sub->add_option("--config", opt.config_path, "experiment configuration (INI)")->required();
        sub->add_option("--out", out, "output path");
        sub->add_option("--seed", seed, "seed for randomized estimates (overrides the config)");
        if (with_trajectory) sub->add_option("--trajectory", trajectory, "trajectory CSV from simulate");
    };
    auto* validate = app.add_subcommand("validate", "check model and solver preconditions");
    auto* simulate = app.add_subcommand("simulate", "run the solver and write the trajectory CSV");
    auto* bounds = app.add_subcommand("bounds", "evaluate blow-up time bounds and verdicts");
    auto* verify = app.add_subcommand("verify", "energy identity, monotonicity and Hardy suites");
    auto* sweep = app.add_subcommand("sweep", "run one experiment per [sweep] value");
    auto* constants = app.add_subcommand("constants", "report the constants entering the bounds");
    for (auto* sub : {validate, simulate, verify, sweep, constants}) common(sub, false);
    common(bounds, true);
    verify->add_flag("--drop-p-term", opt.drop_p_term, "test hook: omit the exponent-rate term from the energy identity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--out")) opt.out = out;
    if (chosen->count("--seed")) opt.seed = seed;
    if (chosen == bounds && bounds->count("--trajectory")) opt.trajectory = trajectory;

    if (chosen == validate) return cmd_validate(opt, std::cout, std::cerr);
    if (chosen == simulate) return cmd_simulate(opt, std::cout, std::cerr);
    if (chosen == bounds) return cmd_bounds(opt, std::cout, std::cerr);
    if (chosen == verify) return cmd_verify(opt, std::cout, std::cerr);
    if (chosen == sweep) return cmd_sweep(opt, std::cout, std::cerr);
    return cmd_constants(opt, std::cout, std::cerr);
}
