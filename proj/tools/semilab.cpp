// Command-line front end: scenario registry, batch runs, artifact emission.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semilab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semilab: operator-semigroup dynamics laboratory"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run a scenario's diagnostic bundle");
    std::string scenario;
    std::string config_file;
    semilab::RunConfig flags;
    run_cmd->add_option("scenario", scenario, "registered scenario name")->required();
    run_cmd->add_option("--t-max", flags.t_max, "largest evolution time");
    run_cmd->add_option("--t-step", flags.t_step, "time grid step");
    run_cmd->add_option("--s-max", flags.s_max, "largest lookahead offset");
    run_cmd->add_option("--s-step", flags.s_step, "lookahead grid step");
    run_cmd->add_option("--grid-step", flags.grid_step, "spatial discretization step");
    run_cmd->add_option("--domain-max", flags.domain_max, "spatial domain cutoff");
    run_cmd->add_option("--k-max", flags.k_max, "number of Cauchy-series terms");
    run_cmd->add_option("--out", flags.out_dir, "output directory (default $SEMILAB_OUT or .)");
    run_cmd->add_option("--format", flags.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_flag("--plot", flags.plot, "also emit SVG line charts");
    run_cmd->add_option("--config", config_file, "key=value config file (flags win)");

    auto* list_cmd = app.add_subcommand("list", "list registered scenarios");

    CLI11_PARSE(app, argc, argv);

    if (list_cmd->parsed()) {
        semilab::list_scenarios(std::cout);
        return 0;
    }

    semilab::RunConfig cfg;
    try {
        if (!config_file.empty()) semilab::apply_config_file(cfg, config_file);
    } catch (const semilab::IoError& e) {
        std::cerr << e.what() << '\n';
        return 4;
    } catch (const semilab::Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
    // Command-line flags override the config file.
    cfg.scenario = scenario;
    if (flags.t_max > 0.0) cfg.t_max = flags.t_max;
    if (flags.t_step > 0.0) cfg.t_step = flags.t_step;
    if (flags.s_max > 0.0) cfg.s_max = flags.s_max;
    if (flags.s_step > 0.0) cfg.s_step = flags.s_step;
    if (flags.grid_step > 0.0) cfg.grid_step = flags.grid_step;
    if (flags.domain_max > 0.0) cfg.domain_max = flags.domain_max;
    if (flags.k_max > 0) cfg.k_max = flags.k_max;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (run_cmd->count("--format")) cfg.format = flags.format;
    if (flags.plot) cfg.plot = true;

    return semilab::run(cfg, std::cout, std::cerr);
}
