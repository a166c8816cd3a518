// roughman: run bundled scenarios, convergence sweeps and driver checks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "roughman/config.hpp"
#include "roughman/errors.hpp"
#include "roughman/scenarios.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace roughman;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string valid_names() {
  std::string s;
  for (const auto& n : scenario_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

void check_scenario_name(const json& cfg) {
  if (cfg.is_object() && cfg.contains("scenario") && cfg["scenario"].is_string() &&
      !is_scenario(cfg["scenario"].get<std::string>()))
    throw UsageError("unknown scenario '" + cfg["scenario"].get<std::string>() + "'; valid scenarios: " + valid_names());
}

/// --out, then ROUGHMAN_OUT, then output.dir from the config, then "out".
fs::path output_root(const std::optional<std::string>& flag, const json& cfg) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ROUGHMAN_OUT"); env && *env) return env;
  if (cfg.contains("output") && cfg["output"].contains("dir")) return cfg["output"]["dir"].get<std::string>();
  return "out";
}

void write_files(const fs::path& dir, const std::vector<OutputFile>& files) {
  fs::create_directories(dir);
  for (const auto& f : files) {
    std::ofstream out(dir / f.name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / f.name).string());
    out << f.content;
  }
}

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> mesh;
  std::optional<long long> seed;
  std::optional<std::string> format;

  RunOptions options() const {
    RunOptions o;
    if (mesh) o.mesh_log2 = *mesh;
    if (seed) o.seed = *seed;
    if (format) o.format = *format;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c, bool with_format = true) {
  cmd->add_option("config", c.config, "Scenario configuration (JSON)")->required();
  cmd->add_option("--out", c.out, "Output directory (overrides ROUGHMAN_OUT and output.dir)");
  cmd->add_option("--mesh", c.mesh, "Use 2^k steps per unit time")->check(CLI::Range(1, 20));
  cmd->add_option("--seed", c.seed, "Seed for randomized inputs")->check(CLI::NonNegativeNumber);
  if (with_format) cmd->add_option("--format", c.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
}

int cmd_run(const Common& c) {
  json cfg = load_config(c.config);
  check_scenario_name(cfg);
  ScenarioResult r = run_scenario(cfg, c.options());
  const fs::path dir = output_root(c.out, cfg) / r.report.scenario;
  write_files(dir, r.files);
  std::cout << r.report.summary() << "  output " << dir.string() << "\n";
  return r.report.pass() ? 0 : kExitFail;
}

int cmd_sweep(const Common& c, bool serial) {
  json cfg = load_config(c.config);
  check_scenario_name(cfg);
  if (!cfg.contains("sweep") || !cfg["sweep"].contains("values") ||
      (cfg["sweep"]["values"].is_array() && cfg["sweep"]["values"].empty()))
    throw UsageError("sweep needs a non-empty sweep.values list");
  SweepResult s = convergence_sweep(cfg, c.options(), serial ? Exec::Serial : Exec::Parallel);
  const fs::path dir = output_root(c.out, cfg) / (s.report.scenario + "_sweep_" + s.parameter);
  write_files(dir, s.files);
  std::cout << s.files.front().content << s.report.summary() << "  output " << dir.string() << "\n";
  return s.report.pass() ? 0 : kExitFail;
}

int cmd_validate_driver(const Common& c) {
  json cfg = load_config(c.config);
  require_valid_config(cfg);
  if (!cfg.contains("driver")) throw UsageError("validate-driver needs a driver section");
  DriverPtr X = driver_from_json(cfg["driver"]);
  const int k = c.mesh ? *c.mesh : cfg.value("mesh", 10);
  ValidateOptions vo;
  vo.seed = c.seed ? static_cast<std::uint64_t>(*c.seed) : cfg.value("seed", std::uint64_t{0});
  DriverReport rep = validate_driver(*X, uniform_grid(0.0, X->horizon(), 1 << k), vo);
  json j = {{"kind", X->kind()},
            {"dim", X->dim()},
            {"p", X->p()},
            {"horizon", X->horizon()},
            {"grid_points", (1 << k) + 1},
            {"triples", rep.triples},
            {"chen_defect", rep.chen_defect},
            {"identity_defect", rep.identity_defect},
            {"lie_defect", rep.lie_defect},
            {"tolerance", vo.tol},
            {"pass", rep.pass}};
  json hc = json::array(), he = json::array();
  for (std::size_t i = 1; i < rep.holder_constant.size(); ++i) {
    hc.push_back(rep.holder_constant[i]);
    he.push_back(std::isfinite(rep.holder_exponent[i]) ? json(rep.holder_exponent[i]) : json());
  }
  j["holder_constant"] = hc;
  j["holder_exponent"] = he;
  const fs::path dir = output_root(c.out, cfg) / "validate_driver";
  write_files(dir, {{"driver_report.json", j.dump(2) + "\n"}});
  std::cout << j.dump(2) << "\n";
  return rep.pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roughman: rough differential equations on embedded manifolds"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, driver_opts;
  bool serial = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over mesh or n");
  add_common(sweep, sweep_opts, false);
  sweep->add_flag("--serial", serial, "Run sweep rows one after another");
  auto* vd = app.add_subcommand("validate-driver", "Check the driver axioms of a configured driver");
  add_common(vd, driver_opts, false);
  auto* list = app.add_subcommand("list-scenarios", "Print the bundled scenario names");
  auto* schema = app.add_subcommand("schema", "Print the configuration schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*list) {
      for (const auto& n : scenario_names()) std::cout << n << "\n";
      return 0;
    }
    if (*schema) {
      std::cout << config_schema().dump(2) << "\n";
      return 0;
    }
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts, serial);
    if (*vd) return cmd_validate_driver(driver_opts);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
