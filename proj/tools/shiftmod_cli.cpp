#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shiftmod/run.hpp"

int main(int argc, char** argv) {
  using namespace shiftmod;
  CLI::App app{"Reconstruct pure isometry semigroups as shifts and run the verification gallery"};
  std::string command, positional_scenario;
  RunConfig cfg;
  int grid = 0;
  std::int64_t horizon = 0;

  app.add_option("command", command, "reconstruct | wold | verify | gallery")->required();
  app.add_option("scenario_name", positional_scenario, "gallery scenario (same as --scenario)");
  auto* grid_opt = app.add_option("--grid", grid, "slots per unit N");
  auto* horizon_opt = app.add_option("--horizon", horizon, "horizon K in units (window for wold, K for nondecex)");
  app.add_option("--tol", cfg.tol, "algebraic tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed of the random stream")->capture_default_str();
  app.add_option("--scenario", cfg.scenario, "gallery scenario: interleave, nondecex, nonsc, nonadex, weyl, all");
  app.add_option("--fixture", cfg.fixture, "JSON fixture");
  app.add_option("--report", cfg.report, "report path (default: standard output)");
  app.add_option("--csv-dir", cfg.csv_dir, "directory for CSV curves");
  app.add_flag("--timing", cfg.timing, "record wall-clock time in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_pass : exit_input_error;
  }

  const auto parsed = parse_command(command);
  if (!parsed) {
    std::cerr << "shiftmod: unknown command '" << command << "'\n";
    return exit_input_error;
  }
  cfg.command = *parsed;
  if (!positional_scenario.empty()) {
    if (!cfg.scenario.empty() && cfg.scenario != positional_scenario) {
      std::cerr << "shiftmod: conflicting scenarios '" << positional_scenario << "' and '" << cfg.scenario << "'\n";
      return exit_input_error;
    }
    cfg.scenario = positional_scenario;
  }
  if (cfg.command != Command::gallery && !cfg.scenario.empty()) {
    std::cerr << "shiftmod: only the gallery command takes a scenario\n";
    return exit_input_error;
  }
  if (grid_opt->count() > 0) cfg.grid = grid;
  if (horizon_opt->count() > 0) cfg.horizon = horizon;
  return execute(cfg);
}
