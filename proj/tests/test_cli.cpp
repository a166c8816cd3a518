#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "roughman/config.hpp"
#include "roughman/io.hpp"
#include "roughman/scenarios.hpp"

using namespace roughman;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_error(const std::vector<SchemaError>& errs, const std::string& path, const std::string& fragment = "") {
  for (const auto& e : errs)
    if (e.path == path && e.message.find(fragment) != std::string::npos) return true;
  return false;
}

/// Runs the CLI through the shell and returns its exit status.
int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" + std::string(ROUGHMAN_CLI) + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("roughman_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const fs::path kSource = ROUGHMAN_SOURCE_DIR;

}  // namespace

TEST_CASE("bundled configs validate") {
  for (const auto& entry : fs::directory_iterator(kSource / "configs")) {
    json doc = json::parse(slurp(entry.path()));
    CHECK_MESSAGE(validate_config(doc).empty(), entry.path().filename().string());
    CHECK(is_scenario(doc["scenario"].get<std::string>()));
  }
}

TEST_CASE("schema errors carry the offending path") {
  CHECK(has_error(validate_config(json{{"mesh", 30}}), "$.mesh", "maximum"));
  CHECK(has_error(validate_config(json{{"mesh", 0.5}}), "$.mesh"));
  CHECK(has_error(validate_config(json{{"foo", 1}}), "$.foo", "unknown key"));
  CHECK(has_error(validate_config(json{{"driver", {{"kind", "pure_area"}, {"A", {{0, "a"}, {0, 0}}}}}}),
                  "$.driver.A[0][1]"));
  CHECK(has_error(validate_config(json{{"driver", {{"kind", "bogus"}}}}), "$.driver.kind"));
  CHECK(has_error(validate_config(json{{"manifold", {{"manifold", "sphere"}, {"radius", -1.0}}}}),
                  "$.manifold.radius"));
  CHECK(has_error(validate_config(json{{"output", {{"format", "xml"}}}}), "$.output.format"));
  CHECK(has_error(validate_config(json::array()), "$", "object"));
  json nested = {{"manifold", {{"manifold", "product"}, {"factors", {{{"manifold", "sphere"}, {"typo", 1}}}}}}};
  CHECK(has_error(validate_config(nested), "$.manifold.factors[0].typo", "unknown key"));
  CHECK_THROWS_AS(require_valid_config(json{{"mesh", 30}}), ConfigError);
}

TEST_CASE("the published schema file matches the built-in schema") {
  CHECK(json::parse(slurp(kSource / "docs" / "config.schema.json")) == config_schema());
}

TEST_CASE("manifold and driver builders") {
  auto S = manifold_from_json({{"manifold", "sphere"}, {"radius", 2.0}});
  CHECK(S->intrinsic_dim() == 2);
  CHECK(S->defect(Vec<double>(Eigen::Vector3d(0, 0, 2))) < 1e-15);
  auto P = manifold_from_json({{"manifold", "product"}, {"factors", {{{"manifold", "so3"}}, {{"manifold", "plane"}, {"dim", 2}}}}});
  CHECK(P->ambient_dim() == 11);
  CHECK(P->intrinsic_dim() == 5);
  CHECK_THROWS_AS(manifold_from_json({{"manifold", "torus"}}), ConfigError);

  auto X = driver_from_json({{"kind", "spinning_line"}, {"e", {1.0, 0.0}}, {"A", {{0, 1}, {-1, 0}}}});
  CHECK(X->dim() == 2);
  CHECK(X->eval(0, 1).degree(2)[1] == doctest::Approx(1.0));
  auto L = driver_from_json({{"kind", "log_linear"}, {"lambda", to_json(LieElement::letter(2, 3, 0).tensor())}});
  CHECK(L->p() == 3.5);
  auto Y = driver_from_json({{"kind", "lift_smooth"}, {"signal", {{"name", "spinning"}, {"n", 4}, {"samples", 257}}}});
  CHECK(Y->horizon() == 1.0);
  CHECK_THROWS_AS(driver_from_json({{"kind", "pure_area"}}), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(json{1, 2}, "A"), ConfigError);
}

TEST_CASE("number formatting and slopes") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(loglog_slope({1, 2, 4}, {1, 0.25, 0.0625}) == doctest::Approx(-2.0));
  CHECK(std::isnan(loglog_slope({1}, {1})));
  auto one = sweep_table("mesh", {8}, {1e-3}, loglog_slope({8}, {1e-3}));
  CHECK(one.rows.back()[0] == "fitted_slope");
  CHECK(one.rows.back()[2] == "n/a");
  auto two = sweep_table("n", {8, 16}, {1.0, 0.5}, -1.0);
  CHECK(two.to_csv().rfind("parameter,value,error\n", 0) == 0);
  CHECK(two.rows.size() == 3);
}

TEST_CASE("trajectory outputs") {
  RDEPath path;
  path.times = {0.0, 0.5};
  path.points = {Vec<double>::Zero(2), Vec<double>::Ones(2)};
  path.blow_up = true;
  path.blow_up_time = 0.75;
  auto t = trajectory_table(path, plain_layout(2));
  CHECK(t.header == std::vector<std::string>{"t", "x_1", "x_2", "flags"});
  CHECK(t.rows[0].back() == "0");
  CHECK(t.rows[1].back() == "1");
  auto j = trajectory_json(path, plain_layout(2));
  CHECK(j["metadata"]["blow_up"]["time"] == 0.75);
  auto B = SurfaceFrameBundle::sphere(1.0);
  auto cols = frame_layout(*B).columns;
  CHECK(cols.size() == 9);
  CHECK(cols[3] == "e1_1");
  CHECK(cols[6] == "e2_1");
}

TEST_CASE("scenario reruns are byte-identical") {
  json cfg = {{"scenario", "blow_up_detection"}};
  RunOptions o;
  o.mesh_log2 = 8;
  auto a = run_scenario(cfg, o), b = run_scenario(cfg, o);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    CHECK(a.files[i].name == b.files[i].name);
    CHECK(a.files[i].content == b.files[i].content);
  }
  CHECK(a.report.scenario == "blow_up_detection");
  CHECK_THROWS_AS(run_scenario(json{{"scenario", "nope"}}, o), ConfigError);
}

TEST_CASE("command line: exit codes and output locations") {
  TempDir tmp;
  const fs::path cfg = kSource / "configs" / "blow_up_detection.json";
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << R"({"scenario": "no_such_scenario"})";

  CHECK(cli("list-scenarios") == 0);
  CHECK(cli("run '" + bad.string() + "' --out '" + (tmp.path / "o").string() + "'") == 2);
  CHECK_FALSE(fs::exists(tmp.path / "o"));
  CHECK(cli("run '" + (tmp.path / "missing.json").string() + "'") == 2);
  CHECK(cli("frobnicate") == 2);

  CHECK(cli("run '" + cfg.string() + "' --mesh 8", "cd '" + tmp.path.string() + "' && ROUGHMAN_OUT=env_out") == 0);
  CHECK(fs::exists(tmp.path / "env_out" / "blow_up_detection" / "report.json"));
  CHECK(cli("run '" + cfg.string() + "' --mesh 8 --out flag_out",
            "cd '" + tmp.path.string() + "' && ROUGHMAN_OUT=env_out") == 0);
  CHECK(fs::exists(tmp.path / "flag_out" / "blow_up_detection" / "trajectory.csv"));
  CHECK(cli("run '" + cfg.string() + "' --mesh 8 --format json", "cd '" + tmp.path.string() + "' && ROUGHMAN_OUT=") ==
        0);
  CHECK(fs::exists(tmp.path / "out" / "blow_up_detection" / "trajectory.json"));
}
