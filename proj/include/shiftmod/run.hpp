#pragma once

// Command dispatch and report emission for the command-line tool.
//
// Report layout (schema_version 1):
//   {"schema_version": 1, "tool": "shiftmod", "command", "config", "input"?,
//    "stages": [{"stage", "checks": [{"name", "residual", "tol", "pass", "detail"?}], "data"?, "pass"}],
//    "fiber"?, "error"?, "timing"?, "pass"}
// Residuals that are not finite are written as null and never pass.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace shiftmod {

enum class Command { reconstruct, wold, verify, gallery };

std::optional<Command> parse_command(std::string_view name);
std::string to_string(Command c);

// Names accepted by the gallery command; "all" runs every one.
const std::vector<std::string>& gallery_scenarios();

struct RunConfig {
  Command command = Command::reconstruct;
  // Unset values fall back to the fixture, then to per-command defaults.
  std::optional<int> grid;
  std::optional<std::int64_t> horizon;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  std::string scenario;
  std::string fixture;
  // Empty: write the report to standard output.
  std::string report;
  std::string csv_dir;
  // Adds wall-clock seconds under "timing"; off by default so reports stay reproducible.
  bool timing = false;
};

struct CurveRow {
  double x = 0.0;
  double value = 0.0;
  std::optional<double> bound;
};

struct Curve {
  std::string name;
  std::vector<CurveRow> rows;
};

enum ExitCode : int { exit_pass = 0, exit_check_failure = 1, exit_input_error = 2 };

struct RunResult {
  nlohmann::json report;
  std::vector<Curve> curves;
  int exit_code = exit_pass;
};

// Never throws for bad input: input errors become exit_input_error with an
// "error" record in the report.
RunResult run(const RunConfig& config);

std::string render_report(const nlohmann::json& report);
// Header x,value,bound; the bound column is empty where absent.
std::string render_csv(const Curve& curve);

// run() followed by writing the report and CSV files. Returns the exit code;
// failure to write an output is an input error.
int execute(const RunConfig& config);

}  // namespace shiftmod
