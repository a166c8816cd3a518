#pragma once

// Bundled scenarios: each runs a configured computation, measures it against
// an oracle and returns a report plus the files to write.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughman/kernels.hpp"

namespace roughman {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  /// "<" value < tolerance, ">" value > tolerance, "in" tolerance ≤ value ≤ upper,
  /// "==" boolean check with value 1 for true.
  std::string relation = "<";
  double upper = 0.0;
  bool pass = false;
  std::string note;
};

Check check_below(std::string name, double value, double tol, std::string note = {});
Check check_above(std::string name, double value, double bound, std::string note = {});
Check check_within(std::string name, double value, double lower, double upper, std::string note = {});
Check check_true(std::string name, bool ok, std::string note = {});

/// Reported quantity that does not enter the pass/fail status.
struct Diagnostic {
  std::string name;
  double value = 0.0;
  std::string note;
};

struct RunReport {
  std::string scenario;
  std::vector<Check> checks;
  std::vector<Diagnostic> diagnostics;
  double seconds = 0.0;
  nlohmann::json mesh = nlohmann::json::object();

  bool pass() const;
  /// Timing excluded, so the result is reproducible.
  nlohmann::json to_json(bool with_timing = true) const;
  std::string summary() const;
};

struct OutputFile {
  std::string name;  // relative to the scenario output directory
  std::string content;
};

struct ScenarioResult {
  RunReport report;
  std::vector<OutputFile> files;
};

struct RunOptions {
  /// log2 of the steps per unit time; -1 keeps the config or scenario default.
  int mesh_log2 = -1;
  /// -1 keeps the config seed (default 0).
  long long seed = -1;
  std::string format;  // "csv" or "json"; empty keeps the config value
};

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

/// Throws ConfigError on schema violations, listing each offending path.
void require_valid_config(const nlohmann::json& config);

/// Runs config["scenario"].
ScenarioResult run_scenario(const nlohmann::json& config, const RunOptions& opts = {});

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<double> errors;
  double slope = 0.0;
  RunReport report;
  std::vector<OutputFile> files;
};

/// One row per value of config["sweep"]: "mesh" (log2 steps per unit, on
/// sphere_horizontal_lift) or "n" (spinning signal, on
/// spinning_line_bracket_flow). Rows run concurrently under Exec::Parallel.
SweepResult convergence_sweep(const nlohmann::json& config, const RunOptions& opts = {},
                              Exec exec = Exec::Parallel);

}  // namespace roughman
