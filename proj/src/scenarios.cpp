#include "roughman/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "roughman/cartan.hpp"
#include "roughman/config.hpp"
#include "roughman/errors.hpp"
#include "roughman/io.hpp"

namespace roughman {

using nlohmann::json;

Check check_below(std::string name, double value, double tol, std::string note) {
  return {std::move(name), value, tol, "<", 0.0, value < tol, std::move(note)};
}

Check check_above(std::string name, double value, double bound, std::string note) {
  return {std::move(name), value, bound, ">", 0.0, value > bound, std::move(note)};
}

Check check_within(std::string name, double value, double lower, double upper, std::string note) {
  return {std::move(name), value, lower, "in", upper, value >= lower && value <= upper, std::move(note)};
}

Check check_true(std::string name, bool ok, std::string note) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", 0.0, ok, std::move(note)};
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

std::string brief(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const Check& c) {
  std::ostringstream os;
  os << c.name << " = " << brief(c.value);
  if (c.relation == "in")
    os << " in [" << brief(c.tolerance) << ", " << brief(c.upper) << "]";
  else if (c.relation != "==")
    os << " " << c.relation << " " << brief(c.tolerance);
  if (!c.note.empty()) os << " (" << c.note << ")";
  return os.str();
}

}  // namespace

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

json RunReport::to_json(bool with_timing) const {
  json cs = json::array();
  for (const auto& c : checks) {
    json j = {{"name", c.name}, {"value", number(c.value)}, {"relation", c.relation},
              {"tolerance", number(c.tolerance)}, {"pass", c.pass}};
    if (c.relation == "in") j["upper"] = number(c.upper);
    if (!c.note.empty()) j["note"] = c.note;
    cs.push_back(j);
  }
  json ds = json::array();
  for (const auto& d : diagnostics) {
    json j = {{"name", d.name}, {"value", number(d.value)}};
    if (!d.note.empty()) j["note"] = d.note;
    ds.push_back(j);
  }
  json out = {{"scenario", scenario}, {"pass", pass()}, {"checks", cs}, {"diagnostics", ds}, {"mesh", mesh}};
  if (with_timing) out["seconds"] = seconds;
  return out;
}

std::string RunReport::summary() const {
  std::ostringstream os;
  os << scenario << ": " << (pass() ? "PASS" : "FAIL") << "\n";
  for (const auto& c : checks) os << "  [" << (c.pass ? "pass" : "FAIL") << "] " << describe(c) << "\n";
  for (const auto& d : diagnostics) {
    os << "  [info] " << d.name << " = " << brief(d.value);
    if (!d.note.empty()) os << " (" << d.note << ")";
    os << "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "  time %.2f s\n", seconds);
  os << buf;
  return os.str();
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {
      "spinning_line_bracket_flow", "sphere_horizontal_lift", "geodesic_recovery",    "cartan_roundtrip",
      "canonical_rep_check",        "lie_group_no_explosion", "pure_rough_path_lift", "blow_up_detection"};
  return names;
}

bool is_scenario(const std::string& name) {
  const auto& n = scenario_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

void require_valid_config(const json& config) {
  auto errors = validate_config(config);
  if (errors.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& e : errors) msg += "\n  " + e.path + ": " + e.message;
  throw ConfigError(msg);
}

namespace {

using Clock = std::chrono::steady_clock;
using Field = std::function<Vec<double>(const Vec<double>&)>;

struct Ctx {
  json cfg;
  json params = json::object();
  int mesh_log2 = 10;
  int substeps = 4;
  std::uint64_t seed = 0;
  std::string format = "csv";

  int steps() const { return 1 << mesh_log2; }
  SolveOptions solve_options() const {
    SolveOptions o;
    o.steps_per_unit = steps();
    o.substeps = substeps;
    return o;
  }
};

Ctx make_ctx(const json& cfg, const RunOptions& opts, int default_mesh) {
  Ctx c;
  c.cfg = cfg;
  if (cfg.contains("params")) c.params = cfg["params"];
  c.mesh_log2 = opts.mesh_log2 >= 0 ? opts.mesh_log2 : cfg.value("mesh", default_mesh);
  if (c.mesh_log2 < 1 || c.mesh_log2 > 20) throw ConfigError("mesh must lie in 1..20");
  c.substeps = cfg.value("substeps", 4);
  c.seed = opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed) : cfg.value("seed", std::uint64_t{0});
  c.format = !opts.format.empty() ? opts.format : (cfg.contains("output") ? cfg["output"].value("format", "csv") : "csv");
  if (c.format != "csv" && c.format != "json") throw ConfigError("format must be csv or json");
  return c;
}

Vec<double> to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec<double>>(v.data(), static_cast<Eigen::Index>(v.size())); }

Vec<double> initial_point(const Ctx& c, Vec<double> fallback) {
  if (c.cfg.contains("initial") && c.cfg["initial"].contains("x0")) {
    Vec<double> x = to_vec(c.cfg["initial"]["x0"].get<std::vector<double>>());
    if (x.size() != fallback.size())
      throw ConfigError("initial.x0 must have " + std::to_string(fallback.size()) + " entries");
    return x;
  }
  return fallback;
}

double sphere_radius(const Ctx& c) {
  if (c.cfg.contains("manifold")) {
    const auto& m = c.cfg["manifold"];
    if (m.at("manifold") != "sphere") throw ConfigError("this scenario runs on a sphere");
    return m.value("radius", 1.0);
  }
  return c.params.value("radius", 1.0);
}

void emit_path(ScenarioResult& r, const Ctx& c, const std::string& stem, const RDEPath& path,
               const StateLayout& layout) {
  if (c.format == "csv") {
    r.files.push_back({stem + ".csv", trajectory_table(path, layout).to_csv()});
    r.files.push_back({stem + ".meta.json", path_metadata(path).dump(2) + "\n"});
  } else {
    r.files.push_back({stem + ".json", trajectory_json(path, layout).dump() + "\n"});
  }
}

Check davie_check(const std::string& name, const DavieReport& d) {
  return {name, d.exponent, 1.0, ">", 0.0, d.pass(), d.exact ? "expansion exact at round-off" : ""};
}

/// Classical RK4 on the ambient coordinates, `substeps` steps per interval.
std::vector<Vec<double>> rk4_reference(const Field& f, Vec<double> x, const std::vector<double>& times, int substeps) {
  std::vector<Vec<double>> out{x};
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double h = (times[k] - times[k - 1]) / substeps;
    for (int s = 0; s < substeps; ++s) {
      Vec<double> k1 = f(x);
      Vec<double> k2 = f(x + 0.5 * h * k1);
      Vec<double> k3 = f(x + 0.5 * h * k2);
      Vec<double> k4 = f(x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out.push_back(x);
  }
  return out;
}

double sup_to_reference(const RDEPath& path, const std::vector<Vec<double>>& ref) {
  double e = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) e = std::max(e, (path.points[k] - ref[k]).norm());
  return e;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- spinning

VfOneForm bracket_pair() { return VfOneForm({coordinate_field(2, 0), shear_field(2, 0, 1)}); }

struct SpinningRow {
  double error = 0.0;       // against the flow of [V1, V2]
  double half_error = 0.0;  // against the flow of ½[V1, V2]
  RoughIntegrator theta;
};

SpinningRow spinning_row(int n, int samples, int substeps, const Vec<double>& x0) {
  auto R2 = make_plane(2);
  VfOneForm F = bracket_pair();
  auto X = lift_spinning_signal(n, samples, 2.5, 1.0);
  SolveOptions o;
  o.steps_per_unit = samples;
  o.substeps = substeps;
  SpinningRow row;
  row.theta = RoughIntegrator::solve(R2, F, X, x0, o);
  RDEPath path = row.theta.path();
  VectorField b = lie_bracket_field(F[0], F[1]);
  Field full = [&b](const Vec<double>& y) { return b(y); };
  Field half = [&b](const Vec<double>& y) -> Vec<double> { return 0.5 * b(y); };
  row.error = sup_to_reference(path, rk4_reference(full, x0, path.times, 2));
  row.half_error = sup_to_reference(path, rk4_reference(half, x0, path.times, 2));
  return row;
}

std::vector<int> n_values(const Ctx& c) {
  if (c.params.contains("n_values")) return c.params["n_values"].get<std::vector<int>>();
  return {8, 16, 32};
}

ScenarioResult spinning_line_bracket_flow(const Ctx& c) {
  ScenarioResult r;
  const std::vector<int> ns = n_values(c);
  const int samples = c.params.value("samples", c.steps());
  const Vec<double> x0 = initial_point(c, Vec<double>::Zero(2));
  std::vector<double> nv, err, half;
  SpinningRow last;
  for (int n : ns) {
    SpinningRow row = spinning_row(n, samples, c.substeps, x0);
    nv.push_back(n);
    err.push_back(row.error);
    half.push_back(row.half_error);
    r.report.diagnostics.push_back({"sup_error_n" + std::to_string(n), row.error, "flow of [V1,V2]"});
    last = std::move(row);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < err.size(); ++i) decreasing = decreasing && err[i] < err[i - 1];
  r.report.checks.push_back(check_true("sup_error_decreasing", decreasing));
  const double slope = loglog_slope(nv, err);
  r.report.checks.push_back(check_within("fitted_slope", slope, -1.3, -0.7, "sup distance to the flow of [V1,V2]"));
  r.report.diagnostics.push_back({"fitted_slope_half_flow", loglog_slope(nv, half), "sup distance to the flow of ½[V1,V2]"});
  for (std::size_t i = 0; i < ns.size(); ++i)
    r.report.diagnostics.push_back({"sup_error_half_n" + std::to_string(ns[i]), half[i], "flow of ½[V1,V2]"});
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(last.theta)));
  r.files.push_back({"errors.csv", sweep_table("n", nv, err, slope).to_csv()});
  emit_path(r, c, "trajectory", last.theta.path(), plain_layout(2));
  r.report.mesh = {{"steps_per_unit", samples}, {"substeps", c.substeps}, {"n_values", ns}};
  return r;
}

// ---------------------------------------------------------------- sphere lift

struct SpinningLineSpec {
  std::vector<double> e{1.0, 0.0};
  std::vector<std::vector<double>> A{{0.0, 1.0}, {-1.0, 0.0}};
  double p = 2.5;
  double horizon = 1.0;
};

SpinningLineSpec spinning_line_spec(const Ctx& c) {
  SpinningLineSpec s;
  if (!c.cfg.contains("driver")) return s;
  const auto& d = c.cfg["driver"];
  if (d.at("kind") != "spinning_line") throw ConfigError("sphere_horizontal_lift needs a spinning_line driver");
  if (d.contains("e")) s.e = d["e"].get<std::vector<double>>();
  if (d.contains("A")) s.A = matrix_from_json(d["A"], "driver.A");
  if (s.e.size() != 2 || s.A.size() != 2) throw ConfigError("$.driver: sphere_horizontal_lift drives with R^2");
  s.p = d.value("p", 2.5);
  s.horizon = d.value("horizon", 1.0);
  return s;
}

struct HorizontalLiftRun {
  RoughIntegrator theta;
  double error = 0.0;
  double frame_defect = 0.0;
};

HorizontalLiftRun horizontal_lift_run(const SurfaceFrameBundle& B, const SpinningLineSpec& s, const Vec<double>& x0,
                                      int steps, int substeps) {
  const Vec<double> e0 = B.default_state(x0);
  auto X = spinning_line(s.e, s.A, s.p, s.horizon);
  SolveOptions o;
  o.steps_per_unit = steps;
  o.substeps = substeps;
  HorizontalLiftRun run;
  run.theta = RoughIntegrator::solve(B.manifold(), B.canonical_horizontal_form(), X, e0, o);
  const RDEPath path = run.theta.path();
  // log X_{s,t} = (t−s)(e + A₁₂[ε₁,ε₂]); [H₁,H₂] = σΩV₁₂.
  const VectorField H1 = B.canonical_horizontal(0), H2 = B.canonical_horizontal(1), V12 = B.vertical_field();
  const double w = s.A[0][1] * kCurvatureBracketSign * B.analytic_curvature();
  Field f = [&](const Vec<double>& y) -> Vec<double> { return s.e[0] * H1(y) + s.e[1] * H2(y) + w * V12(y); };
  run.error = sup_to_reference(path, rk4_reference(f, e0, path.times, 8));
  for (const auto& y : path.points) run.frame_defect = std::max(run.frame_defect, B.frame_defect(y));
  return run;
}

ScenarioResult sphere_horizontal_lift(const Ctx& c) {
  ScenarioResult r;
  const double radius = sphere_radius(c);
  auto B = SurfaceFrameBundle::sphere(radius);
  const Vec<double> x0 = initial_point(c, Vec<double>(Eigen::Vector3d(0, 0, radius)));
  const SpinningLineSpec s = spinning_line_spec(c);
  HorizontalLiftRun run = horizontal_lift_run(*B, s, x0, c.steps(), c.substeps);
  r.report.checks.push_back(check_below("sup_distance_to_flow", run.error, 1e-4, "flow of H1 + Omega V12"));
  r.report.checks.push_back(check_below("frame_defect", run.frame_defect, 1e-8));
  const double omega = curvature_scalar(*B, x0);
  r.report.checks.push_back(
      check_below("curvature_error", std::abs(omega - B->analytic_curvature()), 1e-5, "bracket vs 1/r^2"));
  r.report.diagnostics.push_back({"curvature", omega, "from [H1,H2] by central differences"});
  r.report.diagnostics.push_back({"bracket_sign", kCurvatureBracketSign, "[H1,H2] = sign * Omega * V12"});
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(run.theta)));
  emit_path(r, c, "trajectory", run.theta.path(), frame_layout(*B));
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"radius", radius}};
  return r;
}

// ---------------------------------------------------------------- geodesic

LieElement stated_lambda(double sign) {
  auto e1 = LieElement::letter(2, 4, 0), e2 = LieElement::letter(2, 4, 1);
  auto b12 = lie_bracket(e1, e2);
  return e1 + b12 + lie_bracket(e1, lie_bracket(e1, b12)).scaled(sign);
}

/// Largest distance of the base path from the best-fitting plane through the origin.
double great_circle_deviation(const RDEPath& path) {
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  for (const auto& y : path.points) {
    Eigen::Vector3d x = y.head<3>();
    S += x * x.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(S);
  const Eigen::Vector3d n = es.eigenvectors().col(0);
  double dev = 0.0;
  for (const auto& y : path.points) dev = std::max(dev, std::abs(n.dot(y.head<3>())));
  return dev;
}

struct GeodesicRun {
  RoughIntegrator theta;
  double deviation = 0.0;
  double vertical = 0.0;  // V12 coefficient of the driving field at e0
  double frame_defect = 0.0;
};

GeodesicRun geodesic_run(double radius, const LieElement& lambda, double p, double horizon, const Ctx& c) {
  auto B = SurfaceFrameBundle::sphere(radius);
  const Vec<double> x0 = Eigen::Vector3d(0, 0, radius);
  const Vec<double> e0 = B->default_state(x0);
  auto X = log_linear(lambda, p, horizon);
  GeodesicRun g;
  g.theta = RoughIntegrator::solve(B->manifold(), B->canonical_horizontal_form(), X, e0, c.solve_options());
  const RDEPath path = g.theta.path();
  g.deviation = great_circle_deviation(path);
  TensorOperator op(B->canonical_horizontal_form(), lambda.tensor());
  const Vec<double> v = B->vertical_field()(e0);
  g.vertical = op.field(e0).dot(v) / v.squaredNorm();
  for (const auto& y : path.points) g.frame_defect = std::max(g.frame_defect, B->frame_defect(y));
  return g;
}

ScenarioResult geodesic_recovery(const Ctx& c) {
  ScenarioResult r;
  const double radius = sphere_radius(c);
  LieElement lambda = stated_lambda(-1.0);
  double p = 4.5, horizon = 1.0;
  if (c.cfg.contains("driver")) {
    const auto& d = c.cfg["driver"];
    if (d.at("kind") != "log_linear") throw ConfigError("geodesic_recovery needs a log_linear driver");
    if (d.contains("lambda")) lambda = LieElement(tensor_from_json(d["lambda"]), 1e-10);
    if (lambda.dim() != 2) throw ConfigError("$.driver.lambda: geodesic_recovery drives with R^2");
    p = d.value("p", p);
    horizon = d.value("horizon", horizon);
  }
  GeodesicRun g = geodesic_run(radius, lambda, p, horizon, c);
  r.report.checks.push_back(check_below("great_circle_deviation", g.deviation, 1e-4));
  r.report.checks.push_back(check_below("frame_defect", g.frame_defect, 1e-8));
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(g.theta)));
  r.report.diagnostics.push_back({"vertical_coefficient", g.vertical, "V12 part of the driving field"});
  GeodesicRun corrected = geodesic_run(radius, stated_lambda(1.0), p, horizon, c);
  r.report.diagnostics.push_back(
      {"great_circle_deviation_corrected", corrected.deviation, "Lambda with +[e1,[e1,[e1,e2]]]"});
  r.report.diagnostics.push_back({"vertical_coefficient_corrected", corrected.vertical, ""});
  std::vector<double> radii = c.params.contains("omega_radii") ? c.params["omega_radii"].get<std::vector<double>>()
                                                               : std::vector<double>{2.0};
  for (double rr : radii) {
    const std::string tag = "_r" + format_double(rr);
    GeodesicRun a = geodesic_run(rr, lambda, p, horizon, c);
    GeodesicRun b = geodesic_run(rr, stated_lambda(1.0), p, horizon, c);
    r.report.diagnostics.push_back({"great_circle_deviation" + tag, a.deviation / rr, "relative to the radius"});
    r.report.diagnostics.push_back({"vertical_coefficient" + tag, a.vertical, ""});
    r.report.diagnostics.push_back({"great_circle_deviation_corrected" + tag, b.deviation / rr, ""});
    r.report.diagnostics.push_back({"vertical_coefficient_corrected" + tag, b.vertical, ""});
  }
  auto B = SurfaceFrameBundle::sphere(radius);
  emit_path(r, c, "trajectory", g.theta.path(), frame_layout(*B));
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"radius", radius}, {"p", p}};
  return r;
}

// ---------------------------------------------------------------- Cartan

std::vector<std::vector<double>> random_smooth_path(std::mt19937_64& rng, const std::vector<double>& ts, int dim,
                                                    double sphere_radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> freq(1.0, 6.0);
  Eigen::Vector3d centre(u(rng), u(rng), u(rng));
  if (dim == 2) centre.z() = 0.0;
  centre.normalize();
  std::array<Eigen::Vector3d, 3> amp;
  std::array<double, 3> w{}, phase{};
  for (int k = 0; k < 3; ++k) {
    amp[static_cast<std::size_t>(k)] = Eigen::Vector3d(u(rng), u(rng), u(rng)) * 0.2;
    if (dim == 2) amp[static_cast<std::size_t>(k)].z() = 0.0;
    w[static_cast<std::size_t>(k)] = freq(rng);
    phase[static_cast<std::size_t>(k)] = std::numbers::pi * u(rng);
  }
  std::vector<std::vector<double>> out;
  for (double t : ts) {
    Eigen::Vector3d x = centre;
    for (std::size_t k = 0; k < 3; ++k) x += amp[k] * std::sin(w[k] * t + phase[k]);
    if (sphere_radius > 0) x = sphere_radius * x.normalized();
    if (dim == 2)
      out.push_back({x.x(), x.y()});
    else
      out.push_back({x.x(), x.y(), x.z()});
  }
  return out;
}

struct Roundtrip {
  double error = 0.0;
  double frame_defect = 0.0;
};

Roundtrip cartan_roundtrip_on(const SurfaceFrameBundle& B, const std::vector<double>& ts,
                              const std::vector<std::vector<double>>& gamma, int substeps) {
  const Vec<double> x0 = to_vec(gamma.front());
  const Vec<double> e0 = B.default_state(x0);
  Development a = antidevelop(B, ts, gamma, e0, substeps);
  std::vector<std::vector<double>> u;
  for (const auto& v : a.u) u.push_back({v[0], v[1]});
  Development d = develop(B, ts, u, e0, substeps);
  Roundtrip out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.error = std::max(out.error, (d.frames[i].head(3) - to_vec(gamma[i])).norm());
    out.frame_defect = std::max({out.frame_defect, B.frame_defect(d.frames[i]), B.frame_defect(a.frames[i])});
  }
  return out;
}

ScenarioResult cartan_roundtrip(const Ctx& c) {
  ScenarioResult r;
  std::mt19937_64 rng(c.seed);
  const int n = c.steps();
  const std::vector<double> ts = uniform_grid(0.0, 1.0, n);
  const double radius = sphere_radius(c);
  auto S = SurfaceFrameBundle::sphere(radius);
  auto P = SurfaceFrameBundle::plane();

  auto sphere_path = random_smooth_path(rng, ts, 3, radius);
  Roundtrip rs = cartan_roundtrip_on(*S, ts, sphere_path, c.substeps);
  auto plane_path = random_smooth_path(rng, ts, 2, 0.0);
  for (auto& p : plane_path) p.push_back(0.0);
  Roundtrip rp = cartan_roundtrip_on(*P, ts, plane_path, c.substeps);
  r.report.checks.push_back(check_below("roundtrip_sphere", rs.error, 1e-6));
  r.report.checks.push_back(check_below("roundtrip_plane", rp.error, 1e-6));
  double frame_defect = std::max(rs.frame_defect, rp.frame_defect);

  std::vector<double> thetas = c.params.contains("thetas") ? c.params["thetas"].get<std::vector<double>>()
                                                           : std::vector<double>{std::numbers::pi / 6,
                                                                                 std::numbers::pi / 4,
                                                                                 std::numbers::pi / 3};
  auto Fq = projected_coordinate_form(*S->base_manifold());
  RoughIntegrator transport;
  for (double th : thetas) {
    auto pts = latitude_loop(th, n, radius);
    auto X = lift_smooth_path(ts, pts, 2.0);
    SolveOptions o;
    o.mesh = ts;
    o.substeps = c.substeps;
    const Vec<double> x0 = to_vec(pts.front());
    auto loop = RoughIntegrator::solve(S->base_manifold(), Fq, X, x0, o);
    const Vec<double> e0 = S->default_state(x0);
    transport = parallel_transport(loop, *S, e0, c.substeps);
    const double angle = holonomy_angle(*S, e0, transport.end());
    const double expected = 2.0 * std::numbers::pi * (1.0 - std::cos(th));
    double diff = std::remainder(angle - expected, 2.0 * std::numbers::pi);
    r.report.checks.push_back(check_below("holonomy_error_theta" + format_double(th), std::abs(diff), 1e-4,
                                          "2 pi (1 - cos theta)"));
    for (const auto& y : transport.path().points) frame_defect = std::max(frame_defect, S->frame_defect(y));
  }
  r.report.checks.push_back(check_below("frame_defect", frame_defect, 1e-8));
  if (!thetas.empty()) {
    r.report.checks.push_back(davie_check("davie_exponent", davie_residual(transport)));
    emit_path(r, c, "transport", transport.path(), frame_layout(*S));
  }
  r.report.mesh = {{"samples", n + 1}, {"substeps", c.substeps}, {"radius", radius}};
  return r;
}

// ---------------------------------------------------------------- canonical representation

BundleConnectionForm area_connection(int m) {
  return BundleConnectionForm::make(1, m, [m](const auto& z) {
    using V = std::decay_t<decltype(z)>;
    V out(1);
    // z = (y, x, p): ½(x₁p₂ − x₂p₁)
    out[0] = 0.5 * (z[1] * z[1 + m + 1] - z[2] * z[1 + m]);
    return out;
  });
}

VfOneForm rotation_form(int k) {
  std::vector<VectorField> f;
  for (int i = 0; i < k; ++i) f.push_back(rotation_field(Eigen::Vector3d::Unit(i)));
  return VfOneForm(std::move(f));
}

const std::vector<std::vector<double>> kArea3{{0.0, 1.0, 0.0}, {-1.0, 0.0, 0.5}, {0.0, -0.5, 0.0}};

void add_representation_checks(RunReport& rep, const std::string& tag, const RepresentationReport& v) {
  rep.checks.push_back(check_below(tag + "_distance", v.distance, v.tol));
  rep.checks.push_back(check_below(tag + "_frame_defect", v.frame_defect, 1e-8));
  rep.checks.push_back(check_below(tag + "_Z_chen", v.z_report.chen_defect, 1e-8));
  rep.checks.push_back(check_below(tag + "_Z_lie", v.z_report.lie_defect, 1e-6));
}

/// max |Z'_{0,t} − (R⁻¹)^⊗ Z_{0,t}| over the mesh for two representations
/// whose initial frames differ by the rotation R (angle phi).
double e0_rotation_defect(const CanonicalRepresentation& a, const CanonicalRepresentation& b, double phi) {
  const double cs = std::cos(phi), sn = std::sin(phi);
  // R⁻¹ = [[c, s], [−s, c]]
  const double Ri[2][2] = {{cs, sn}, {-sn, cs}};
  double worst = 0.0;
  for (std::size_t k = 0; k < a.Z_path.size(); ++k) {
    const TruncatedTensor& Za = a.Z_path[k];
    TruncatedTensor expect = TruncatedTensor::zero(2, Za.level());
    expect.scalar() = Za.scalar();
    for (int deg = 1; deg <= Za.level(); ++deg) {
      auto src = Za.degree(deg);
      auto dst = expect.degree(deg);
      for (std::size_t idx = 0; idx < src.size(); ++idx) {
        // dst[i₁…i_k] = Σ Π R⁻¹[i_j][w_j] src[w]
        for (std::size_t w = 0; w < src.size(); ++w) {
          double coef = 1.0;
          std::size_t ii = idx, ww = w;
          for (int j = 0; j < deg; ++j) {
            coef *= Ri[ii % 2][ww % 2];
            ii /= 2;
            ww /= 2;
          }
          dst[idx] += coef * src[w];
        }
      }
    }
    worst = std::max(worst, max_abs_diff(expect, b.Z_path[k]));
  }
  return worst;
}

ScenarioResult canonical_rep_check(const Ctx& c) {
  ScenarioResult r;
  const double tol = c.params.value("tolerance", 1e-3);
  std::mt19937_64 rng(c.seed);
  const int n = c.steps();
  const auto ts = uniform_grid(0.0, 1.0, n);
  const SolveOptions o = c.solve_options();
  auto N = make_plane(1);
  const Vec<double> y0 = Vec<double>::Zero(1);

  // (a) GL(R²), identity one-form: Z reproduces X.
  {
    FlatFrameBundle fb(2);
    auto X = lift_smooth_path(ts, random_smooth_path(rng, ts, 2, 0.0), 2.5);
    VfOneForm F({coordinate_field(2, 0), coordinate_field(2, 1)});
    const Vec<double> x0 = Vec<double>::Zero(2);
    auto theta = RoughIntegrator::solve(fb.base_manifold(), F, X, x0, o);
    const Vec<double> e0 = fb.default_state(x0);
    auto rep = canonical_representation(theta, fb, e0, c.substeps);
    auto v = verify_representation(theta, rep, fb, area_connection(2), N, y0, tol, c.substeps);
    add_representation_checks(r.report, "flat", v);
    double zx = 0.0;
    for (double t : rep.Z->times()) zx = std::max(zx, max_abs_diff(rep.Z->eval(0.0, t), X->eval(0.0, t)));
    r.report.checks.push_back(check_below("flat_Z_equals_X", zx, 1e-6));
  }

  auto S = SurfaceFrameBundle::sphere(1.0);
  const Vec<double> np = Eigen::Vector3d(0, 0, 1);
  const Vec<double> e0 = S->default_state(np);

  // (b) rotation fields over U = R³, smooth driver.
  {
    auto X = lift_smooth_path(ts, random_smooth_path(rng, ts, 3, 0.0), 2.5);
    auto theta = RoughIntegrator::solve(S->base_manifold(), rotation_form(3), X, np, o);
    auto rep = canonical_representation(theta, *S, e0, c.substeps);
    auto v = verify_representation(theta, rep, *S, area_connection(3), N, y0, tol, c.substeps);
    add_representation_checks(r.report, "sphere_smooth", v);
    r.report.checks.push_back(davie_check("davie_exponent", davie_residual(theta)));
    const double phi = 0.3;
    FrameBundlePoint p = S->unpack(e0);
    Eigen::Matrix2d R;
    R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    p.frame = p.frame * R;
    auto rotated = canonical_representation(theta, *S, S->pack(p), c.substeps);
    r.report.diagnostics.push_back({"e0_rotation_defect", e0_rotation_defect(rep, rotated, phi),
                                    "|Z' - (R^-1 x ... x R^-1) Z| for e0' = e0 R"});
    r.files.push_back({"frames.csv", representation_frames(rep, *S).to_csv()});
    r.files.push_back({"Z.json", to_json(rep).dump(2) + "\n"});
    emit_path(r, c, "trajectory", theta.path(), plain_layout(3));
  }

  // (c) the same fields driven by a pure area.
  {
    auto X = pure_area(kArea3);
    auto theta = RoughIntegrator::solve(S->base_manifold(), rotation_form(3), X, np, o);
    auto v = verify_representation(theta, *S, area_connection(3), N, e0, y0, tol, c.substeps);
    add_representation_checks(r.report, "sphere_area", v);
  }

  // (d) U = R² then U = R³, one driver over E = R².
  {
    std::vector<std::vector<double>> w2;
    for (const auto& v : random_smooth_path(rng, ts, 2, 0.0)) w2.push_back({v[0] - 0.5, v[1]});
    auto X1 = lift_smooth_path(ts, w2, 2.5);
    auto th1 = RoughIntegrator::solve(S->base_manifold(), rotation_form(2), X1, np, o);
    auto th2 = RoughIntegrator::solve(S->base_manifold(), rotation_form(3), pure_area(kArea3), th1.end(), o);
    auto theta = concatenate({th1, th2});
    auto rep = canonical_representation(theta, *S, e0, c.substeps);
    r.report.checks.push_back(check_true("mixed_single_E_driver", rep.Z->dim() == 2));
    auto v = verify_representation(theta, rep, *S, area_connection(3), N, y0, tol, c.substeps);
    add_representation_checks(r.report, "mixed", v);
  }
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"tolerance", tol}};
  return r;
}

// ---------------------------------------------------------------- SO(3)

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
  const double a = w.norm();
  const Eigen::Matrix3d K = hat(w);
  if (a < 1e-12) return Eigen::Matrix3d::Identity() + K;
  return Eigen::Matrix3d::Identity() + std::sin(a) / a * K + (1.0 - std::cos(a)) / (a * a) * K * K;
}

ScenarioResult lie_group_no_explosion(const Ctx& c) {
  ScenarioResult r;
  const double horizon = c.cfg.value("horizon", 10.0);
  std::vector<double> e{1.0, 0.5, -0.3};
  std::vector<std::vector<double>> A = kArea3;
  double p = 2.5;
  if (c.cfg.contains("driver")) {
    const auto& d = c.cfg["driver"];
    if (d.at("kind") != "spinning_line") throw ConfigError("lie_group_no_explosion needs a spinning_line driver");
    if (d.contains("e")) e = d["e"].get<std::vector<double>>();
    if (d.contains("A")) A = matrix_from_json(d["A"], "driver.A");
    if (e.size() != 3 || A.size() != 3) throw ConfigError("$.driver: lie_group_no_explosion drives with R^3");
    p = d.value("p", p);
  }
  auto G = make_so3();
  VfOneForm F({left_invariant_field(Eigen::Vector3d::UnitX()), left_invariant_field(Eigen::Vector3d::UnitY()),
               left_invariant_field(Eigen::Vector3d::UnitZ())});
  const Vec<double> g0 = SpecialOrthogonal3::pack(Eigen::Matrix3d::Identity());
  auto X = spinning_line(e, A, p, horizon);
  auto theta = RoughIntegrator::solve(G, F, X, g0, c.solve_options());
  const RDEPath path = theta.path();
  double orth = 0.0;
  for (const auto& y : path.points) orth = std::max(orth, SpecialOrthogonal3::orthogonality_defect(y));
  // Constant log increment (t−s)(e + Σ_{i<j} A_ij [ε_i,ε_j]); [V_a, V_b] = V_{a×b}.
  Eigen::Vector3d w(e[0], e[1], e[2]);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      w += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
           Eigen::Vector3d::Unit(i).cross(Eigen::Vector3d::Unit(j));
  double err = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k)
    err = std::max(err, (SpecialOrthogonal3::unpack(path.points[k]) - rodrigues(path.times[k] * w)).cwiseAbs().maxCoeff());
  r.report.checks.push_back(check_below("orthogonality_defect", orth, 1e-8));
  r.report.checks.push_back(check_true("no_blow_up", !theta.blew_up() && path.times.back() == horizon));
  r.report.checks.push_back(check_below("distance_to_exponential", err, 1e-6, "g0 exp(t hat(w))"));
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(theta)));
  emit_path(r, c, "trajectory", path, plain_layout(9));
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"horizon", horizon}};
  return r;
}

// ---------------------------------------------------------------- pure rough path

/// Level-2 Euler scheme x ← x + V_i X^i + (DV_j·V_i) X^{ij}, Jacobians by central differences.
Vec<double> davie_euler(const VfOneForm& F, const RoughPathDriver& X, Vec<double> x, int steps) {
  const int d = F.dim_u();
  const double T = X.horizon();
  const double h = 1e-6;
  for (int k = 0; k < steps; ++k) {
    const TruncatedTensor inc = X.eval(T * k / steps, T * (k + 1) / steps);
    std::vector<Vec<double>> V;
    for (int i = 0; i < d; ++i) V.push_back(F[i](x));
    Vec<double> next = x;
    for (int i = 0; i < d; ++i) next += inc.degree(1)[static_cast<std::size_t>(i)] * V[static_cast<std::size_t>(i)];
    if (inc.level() >= 2)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double a = inc.degree(2)[static_cast<std::size_t>(i * d + j)];
          if (a == 0.0) continue;
          const Vec<double>& vi = V[static_cast<std::size_t>(i)];
          Vec<double> dvj = (F[j](Vec<double>(x + h * vi)) - F[j](Vec<double>(x - h * vi))) / (2 * h);
          next += a * dvj;
        }
    x = next;
  }
  return x;
}

ScenarioResult pure_rough_path_lift(const Ctx& c) {
  ScenarioResult r;
  auto R2 = make_plane(2);
  auto X = pure_area({{0.0, 1.0}, {-1.0, 0.0}});
  const Vec<double> x0 = initial_point(c, Vec<double>::Zero(2));

  VfOneForm F = bracket_pair();
  auto theta = RoughIntegrator::solve(R2, F, X, x0, c.solve_options());
  const Vec<double> oracle = davie_euler(F, *X, x0, 10000);
  r.report.checks.push_back(check_below("bracket_flow_endpoint", (theta.end() - oracle).norm(), 1e-6,
                                        "Davie-Euler at mesh 1e-4"));
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(theta)));

  VfOneForm C({coordinate_field(2, 0), coordinate_field(2, 1)});
  auto pure = RoughIntegrator::solve(R2, C, X, x0, c.solve_options());
  double drift = 0.0;
  for (const auto& y : pure.path().points) drift = std::max(drift, (y - x0).cwiseAbs().maxCoeff());
  r.report.checks.push_back(check_below("base_path_drift", drift, 1e-10, "commuting fields"));
  auto lifted = lift_through_connection(pure, area_connection(2), make_plane(1), Vec<double>::Zero(1), c.substeps);
  const double moved = lifted.end()[2];
  // Lifted fields (1,0,−x₂/2), (0,1,x₁/2) bracket to ∂_y; area A₁₂ = 1 per unit time.
  r.report.checks.push_back(check_below("lift_displacement_error", std::abs(moved - X->horizon()), 1e-10,
                                        "fibre moves by the enclosed area"));
  r.report.diagnostics.push_back({"lift_displacement", moved, ""});
  r.report.checks.push_back(davie_check("davie_exponent_lift", davie_residual(lifted)));
  emit_path(r, c, "trajectory", theta.path(), plain_layout(2));
  emit_path(r, c, "lift", lifted.path(), plain_layout(3));
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"oracle_steps", 10000}};
  return r;
}

// ---------------------------------------------------------------- blow-up

ScenarioResult blow_up_detection(const Ctx& c) {
  ScenarioResult r;
  auto R1 = make_plane(1);
  VfOneForm F({quadratic_field(1, 0)});
  const double horizon = c.cfg.value("horizon", 2.0);
  auto X = log_linear(LieElement::letter(1, 2, 0), 2.0, horizon);
  SolveOptions o = c.solve_options();
  o.blowup_bound = c.params.value("blowup_bound", 1e6);
  const Vec<double> x0 = initial_point(c, Vec<double>::Constant(1, 1.0));
  auto theta = RoughIntegrator::solve(R1, F, X, x0, o);
  RDEPath path = theta.path();
  const double x_init = x0[0];
  const double t_star = 1.0 / x_init;
  r.report.checks.push_back(check_true("blow_up_flagged", theta.blew_up()));
  r.report.checks.push_back(check_below("blow_up_time_error", std::abs(theta.lifetime() - t_star), 0.05,
                                        "analytic 1/(1-t)"));
  double rel = 0.0;
  RDEPath early = path;
  early.times.clear();
  early.points.clear();
  early.blow_up = false;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (path.times[k] > 0.9 * t_star) break;
    const double exact = x_init / (1.0 - x_init * path.times[k]);
    rel = std::max(rel, std::abs(path.points[k][0] - exact) / exact);
    if (path.times[k] <= 0.5 * t_star) {
      early.times.push_back(path.times[k]);
      early.points.push_back(path.points[k]);
    }
  }
  r.report.checks.push_back(check_below("relative_error_before_0.9", rel, 1e-6, "analytic 1/(1-t)"));
  r.report.checks.push_back(davie_check("davie_exponent", davie_residual(early, F, *X, coordinate_and_quadratic_tests(1))));
  r.report.diagnostics.push_back({"blow_up_time", theta.lifetime(), ""});
  emit_path(r, c, "trajectory", path, plain_layout(1));
  r.report.mesh = {{"steps_per_unit", c.steps()}, {"substeps", c.substeps}, {"blowup_bound", o.blowup_bound}};
  return r;
}

int default_mesh(const std::string& name) {
  if (name == "spinning_line_bracket_flow") return 14;
  if (name == "sphere_horizontal_lift" || name == "cartan_roundtrip") return 12;
  return 10;
}

}  // namespace

ScenarioResult run_scenario(const json& config, const RunOptions& opts) {
  require_valid_config(config);
  if (!config.contains("scenario")) throw ConfigError("invalid configuration:\n  $.scenario: required field missing");
  const std::string name = config.at("scenario").get<std::string>();
  if (!is_scenario(name)) throw ConfigError("unknown scenario '" + name + "'");
  const Ctx c = make_ctx(config, opts, default_mesh(name));
  const auto t0 = Clock::now();
  ScenarioResult r;
  if (name == "spinning_line_bracket_flow") r = spinning_line_bracket_flow(c);
  else if (name == "sphere_horizontal_lift") r = sphere_horizontal_lift(c);
  else if (name == "geodesic_recovery") r = geodesic_recovery(c);
  else if (name == "cartan_roundtrip") r = cartan_roundtrip(c);
  else if (name == "canonical_rep_check") r = canonical_rep_check(c);
  else if (name == "lie_group_no_explosion") r = lie_group_no_explosion(c);
  else if (name == "pure_rough_path_lift") r = pure_rough_path_lift(c);
  else r = blow_up_detection(c);
  r.report.scenario = name;
  r.report.seconds = seconds_since(t0);
  r.report.mesh["seed"] = c.seed;
  r.files.push_back({"report.json", r.report.to_json(false).dump(2) + "\n"});
  return r;
}

SweepResult convergence_sweep(const json& config, const RunOptions& opts, Exec exec) {
  require_valid_config(config);
  if (!config.contains("scenario")) throw ConfigError("invalid configuration:\n  $.scenario: required field missing");
  if (!config.contains("sweep")) throw ConfigError("$.sweep: required for a sweep");
  const auto& sw = config["sweep"];
  SweepResult out;
  out.parameter = sw.at("parameter").get<std::string>();
  out.values = sw.at("values").get<std::vector<double>>();
  if (out.values.empty()) throw ConfigError("$.sweep.values: empty sweep");
  const std::string name = config.at("scenario").get<std::string>();
  const auto t0 = Clock::now();
  Ctx c = make_ctx(config, opts, default_mesh(name));
  out.errors.assign(out.values.size(), 0.0);
  std::vector<double> half(out.values.size(), 0.0);
  std::vector<double> x_axis = out.values;

  std::function<void(std::size_t)> row;
  if (out.parameter == "mesh") {
    if (name != "sphere_horizontal_lift") throw ConfigError("$.sweep.parameter: mesh sweeps run on sphere_horizontal_lift");
    const double radius = sphere_radius(c);
    const SpinningLineSpec s = spinning_line_spec(c);
    const Vec<double> x0 = initial_point(c, Vec<double>(Eigen::Vector3d(0, 0, radius)));
    for (double k : out.values)
      if (k < 1 || k > 20 || k != std::floor(k)) throw ConfigError("$.sweep.values: mesh values are log2 steps in 1..20");
    for (std::size_t i = 0; i < out.values.size(); ++i) x_axis[i] = std::ldexp(1.0, -static_cast<int>(out.values[i]));
    row = [&, radius, x0, s](std::size_t i) {
      auto B = SurfaceFrameBundle::sphere(radius);
      out.errors[i] = horizontal_lift_run(*B, s, x0, 1 << static_cast<int>(out.values[i]), c.substeps).error;
    };
  } else {
    if (name != "spinning_line_bracket_flow") throw ConfigError("$.sweep.parameter: n sweeps run on spinning_line_bracket_flow");
    const int samples = c.params.value("samples", c.steps());
    const Vec<double> x0 = initial_point(c, Vec<double>::Zero(2));
    for (double n : out.values)
      if (n < 1 || n != std::floor(n)) throw ConfigError("$.sweep.values: n values are positive integers");
    row = [&, samples, x0](std::size_t i) {
      SpinningRow rr = spinning_row(static_cast<int>(out.values[i]), samples, c.substeps, x0);
      out.errors[i] = rr.error;
      half[i] = rr.half_error;
    };
  }

  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < out.values.size(); ++i) row(i);
  } else {
    std::exception_ptr error;
    const auto count = static_cast<long long>(out.values.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
      try {
        row(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(roughman_sweep_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  }

  out.slope = loglog_slope(x_axis, out.errors);
  RunReport& rep = out.report;
  rep.scenario = name;
  if (out.values.size() < 2) {
    rep.diagnostics.push_back({"fitted_slope", out.slope, "not applicable for a single row"});
  } else if (out.parameter == "mesh") {
    rep.checks.push_back(check_above("fitted_order", out.slope, 0.0, "log error against log mesh width"));
  } else {
    rep.checks.push_back(check_within("fitted_slope", out.slope, -1.3, -0.7, "sup distance to the flow of [V1,V2]"));
    rep.diagnostics.push_back({"fitted_slope_half_flow", loglog_slope(x_axis, half), "flow of ½[V1,V2]"});
  }
  std::vector<double> shown = out.parameter == "mesh" ? x_axis : out.values;
  Table t = sweep_table(out.parameter, shown, out.errors, out.slope);
  rep.seconds = seconds_since(t0);
  rep.mesh = {{"parameter", out.parameter}, {"values", out.values}, {"substeps", c.substeps}, {"seed", c.seed}};
  if (out.parameter == "n") rep.mesh["samples"] = c.params.value("samples", c.steps());
  out.files.push_back({"sweep.csv", t.to_csv()});
  out.files.push_back({"sweep_report.json", rep.to_json(false).dump(2) + "\n"});
  return out;
}

}  // namespace roughman
