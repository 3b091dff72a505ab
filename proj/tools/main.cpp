#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "viscogrid/cli/commands.hpp"
#include "viscogrid/cli/config.hpp"

using namespace viscogrid::cli;

namespace {

// Flag name (dashes) -> config key (underscores).
const std::map<std::string, std::string> kFlags = {
    {"model", "model"},   {"p", "p"},           {"g", "g"},
    {"gamma", "gamma"},   {"f", "f"},           {"levels", "levels"},
    {"finest", "finest"}, {"nu1", "nu1"},       {"nu2", "nu2"},
    {"mode", "mode"},     {"sigma1", "sigma1"}, {"eps", "eps"},
    {"outer-tol", "outer_tol"}, {"max-cycles", "max_cycles"}, {"transfer", "transfer"},
    {"casson-preconditioner", "casson_preconditioner"}, {"reference", "reference"},
    {"output", "output"}, {"cache-dir", "cache_dir"}, {"seed", "seed"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viscogrid: multilevel optimization for viscoplastic pipe flow"};
  app.require_subcommand(1);

  CLI::App* solve = app.add_subcommand("solve", "solve one problem (mgopt, descent or fmg)");
  std::string config_file;
  solve->add_option("--config", config_file, "key=value file; flags override it");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const auto& [flag, key] : kFlags) {
    flag_options[key] = solve->add_option("--" + flag, flag_values[key]);
  }

  CLI::App* experiment = app.add_subcommand("experiment", "run one of the benchmark experiments (1-4)");
  int experiment_id = 0;
  ExperimentOptions exp_opt;
  std::string exp_output = ".";
  std::string exp_cache;
  experiment->add_option("id", experiment_id, "experiment number")->required();
  experiment->add_option("--output", exp_output, "directory for the CSV tables");
  experiment->add_option("--cache-dir", exp_cache, "directory for ref_<hash>.txt (default: output)");
  experiment->add_option("--descent-budget", exp_opt.max_descent_iterations, "iteration cap of the descent baseline");

  CLI::App* mesh_info = app.add_subcommand("mesh-info", "print the unit-disk mesh hierarchy");
  int mesh_levels = 7;
  mesh_info->add_option("--levels", mesh_levels, "number of levels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitError;
  }

  if (*solve) {
    RunConfig cfg;
    try {
      if (!config_file.empty()) apply_config_file(cfg, config_file);
      for (const auto& [key, option] : flag_options) {
        if (option->count() > 0) apply_key(cfg, key, flag_values[key]);
      }
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n\n" << solve->help();
      return kExitError;
    }
    return cmd_solve(cfg, std::cout, std::cerr);
  }
  if (*experiment) {
    exp_opt.output = exp_output;
    exp_opt.cache_dir = exp_cache;
    return cmd_experiment(experiment_id, exp_opt, std::cout, std::cerr);
  }
  return cmd_mesh_info(mesh_levels, std::cout, std::cerr);
}
