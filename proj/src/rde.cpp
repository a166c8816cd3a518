#include "roughman/rde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace roughman {

const Vec<double>& RDEPath::at_time(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  require(it != times.end() && *it == t, "RDEPath::at_time: no sample at the requested time");
  return points[static_cast<std::size_t>(it - times.begin())];
}

// ------------------------------------------------------------ stepping

namespace {

bool out_of_bounds(const Vec<double>& y, double bound) {
  return !y.allFinite() || y.lpNorm<Eigen::Infinity>() > bound;
}

}  // namespace

StepResult log_ode_step(const EmbeddedManifold& M, const VfOneForm& F, const Vec<double>& x0,
                        const TruncatedTensor& log_increment, int substeps, double blowup_bound) {
  require(substeps >= 1, "log_ode_step: substeps must be positive");
  require(x0.size() == M.ambient_dim() && F.ambient_dim() == M.ambient_dim(),
          "log_ode_step: state, fields and manifold disagree on the ambient dimension");
  require(std::abs(log_increment.scalar()) <= 1e-12, "log_ode_step: log increment needs zero scalar part");
  TruncatedTensor L = log_increment;
  L.scalar() = 0.0;
  const TensorOperator op(F, std::move(L));
  StepResult res{x0, false, 1.0};
  if (op.top_degree() == 0) return res;

  const double h = 1.0 / substeps;
  Vec<double> y = x0;
  for (int i = 0; i < substeps; ++i) {
    const Vec<double> k1 = op.field(y);
    const Vec<double> k2 = op.field(Vec<double>(y + 0.5 * h * k1));
    const Vec<double> k3 = op.field(Vec<double>(y + 0.5 * h * k2));
    const Vec<double> k4 = op.field(Vec<double>(y + h * k3));
    Vec<double> next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (out_of_bounds(next, blowup_bound)) {
      res.x = y;
      res.blew_up = true;
      res.completed = static_cast<double>(i) / substeps;
      return res;
    }
    y = M.retract(next);
  }
  res.x = std::move(y);
  return res;
}

StepResult log_ode_step(const EmbeddedManifold& M, const VfOneForm& F, const Vec<double>& x0,
                        const LieElement& log_increment, int substeps, double blowup_bound) {
  return log_ode_step(M, F, x0, log_increment.tensor(), substeps, blowup_bound);
}

std::vector<double> solve_mesh(const SolveOptions& opts, double horizon) {
  if (!opts.mesh.empty()) {
    require(opts.mesh.size() >= 2 && opts.mesh.front() == 0.0, "solve_rde: mesh must start at 0");
    for (std::size_t i = 1; i < opts.mesh.size(); ++i)
      require(opts.mesh[i] > opts.mesh[i - 1], "solve_rde: mesh must be strictly increasing");
    require(opts.mesh.back() <= horizon, "solve_rde: mesh extends beyond the driver horizon");
    return opts.mesh;
  }
  const double T = opts.t_end > 0.0 ? opts.t_end : horizon;
  require(T <= horizon, "solve_rde: t_end beyond the driver horizon");
  require(opts.steps_per_unit >= 1, "solve_rde: steps_per_unit must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(T * opts.steps_per_unit - 1e-9)));
  return uniform_grid(0.0, T, n);
}

RDEPath solve_rde(const EmbeddedManifold& M, const RoughPathDriver& X, const VfOneForm& F, const Vec<double>& x0,
                  const SolveOptions& opts) {
  require(F.dim_u() == X.dim(), "solve_rde: one-form takes R^" + std::to_string(F.dim_u()) + ", driver is over R^" +
                                    std::to_string(X.dim()));
  require(F.ambient_dim() == M.ambient_dim(), "solve_rde: fields and manifold disagree on the ambient dimension");
  require(x0.size() == M.ambient_dim(), "solve_rde: initial point has the wrong dimension");
  if (!(M.defect(x0) <= 1e-8)) {
    std::ostringstream os;
    os << "solve_rde: initial point is off " << M.name() << " (defect " << M.defect(x0) << ")";
    throw ContractViolation(os.str());
  }
  RDEPath path;
  path.steps_per_unit = opts.mesh.empty() ? opts.steps_per_unit : 0;
  path.substeps = opts.substeps;
  path.p = X.p();
  path.level = X.level();
  const std::vector<double> mesh = solve_mesh(opts, X.horizon());
  path.times.reserve(mesh.size());
  path.points.reserve(mesh.size());
  path.times.push_back(mesh.front());
  path.points.push_back(x0);
  Vec<double> x = x0;
  for (std::size_t k = 0; k + 1 < mesh.size(); ++k) {
    const TruncatedTensor L = tensor_log(X.eval(mesh[k], mesh[k + 1]));
    StepResult r = log_ode_step(M, F, x, L, opts.substeps, opts.blowup_bound);
    if (r.blew_up) {
      path.blow_up = true;
      path.blow_up_time = mesh[k] + r.completed * (mesh[k + 1] - mesh[k]);
      break;
    }
    x = std::move(r.x);
    path.times.push_back(mesh[k + 1]);
    path.points.push_back(x);
  }
  return path;
}

// ------------------------------------------------------- RoughIntegrator

RoughIntegrator::RoughIntegrator(std::vector<IntegratorSegment> segments) : segments_(std::move(segments)) {
  require(!segments_.empty(), "RoughIntegrator: needs at least one segment");
  for (const auto& s : segments_) {
    require(s.M && s.X, "RoughIntegrator: segment without manifold or driver");
    require(!s.path.points.empty(), "RoughIntegrator: segment with an empty path");
    require(s.M->ambient_dim() == segments_.front().M->ambient_dim(),
            "RoughIntegrator: segments live in different ambient spaces");
  }
}

RoughIntegrator RoughIntegrator::solve(ManifoldPtr M, VfOneForm F, DriverPtr X, const Vec<double>& x0,
                                       const SolveOptions& opts) {
  IntegratorSegment seg;
  seg.path = solve_rde(*M, *X, F, x0, opts);
  seg.M = std::move(M);
  seg.F = std::move(F);
  seg.X = std::move(X);
  return RoughIntegrator({std::move(seg)});
}

RDEPath RoughIntegrator::path() const {
  RDEPath out = segments_.front().path;
  out.times.clear();
  out.points.clear();
  for (std::size_t j = 0; j < segments_.size(); ++j) {
    const auto& s = segments_[j];
    for (std::size_t i = (j == 0 ? 0 : 1); i < s.path.size(); ++i) {
      out.times.push_back(s.t_offset + s.path.times[i]);
      out.points.push_back(s.path.points[i]);
    }
    if (s.path.blow_up) {
      out.blow_up = true;
      out.blow_up_time = s.t_offset + s.path.blow_up_time;
      break;
    }
  }
  return out;
}

double RoughIntegrator::t_end() const {
  const auto& s = segments_.back();
  return s.t_offset + s.path.times.back();
}

bool RoughIntegrator::blew_up() const {
  return std::any_of(segments_.begin(), segments_.end(), [](const auto& s) { return s.path.blow_up; });
}

double RoughIntegrator::lifetime() const {
  for (const auto& s : segments_)
    if (s.path.blow_up) return s.t_offset + s.path.blow_up_time;
  return std::numeric_limits<double>::infinity();
}

RoughIntegrator concatenate(const std::vector<RoughIntegrator>& parts) {
  require(!parts.empty(), "concatenate: nothing to concatenate");
  std::vector<IntegratorSegment> segs;
  double offset = 0.0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& part = parts[k];
    if (k > 0) {
      require(!parts[k - 1].blew_up(), "concatenate: segment " + std::to_string(k) + " follows an exploded one");
      const double gap = (part.start() - parts[k - 1].end()).lpNorm<Eigen::Infinity>();
      if (!(gap <= 1e-8)) {
        std::ostringstream os;
        os << "concatenate: junction " << k << " does not match (gap " << gap << ")";
        throw ContractViolation(os.str());
      }
    }
    const double base = part.segments().front().t_offset;
    for (auto s : part.segments()) {
      s.t_offset = offset + (s.t_offset - base);
      segs.push_back(std::move(s));
    }
    offset += part.t_end() - base;
  }
  return RoughIntegrator(std::move(segs));
}

// ------------------------------------------------------ connection lifts

BundleConnectionForm zero_connection(int n, int m) {
  return BundleConnectionForm::make(
      n, m, [n](const auto& z) { return std::decay_t<decltype(z)>(std::decay_t<decltype(z)>::Zero(n)); },
      "G=0");
}

BundleConnectionForm exact_one_form(const SmoothMap& f) {
  require(f.out_dim() == 1, "exact_one_form: f must be scalar");
  const int m = f.in_dim();
  return BundleConnectionForm::make(
      1, m,
      [f, m](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        using S = typename V::Scalar;
        if constexpr (dual_depth_v<S> < kMaxDualDepth) {
          const V x = z.segment(1, m);
          const V p = z.tail(m);
          return V(eps_part(f(seed(x, p))));
        } else {
          throw ContractViolation("exact_one_form: dual nesting exhausted");
          return V(z.head(1));
        }
      },
      "df");
}

BundleConnectionForm constant_one_form(const Vec<double>& c) {
  const int m = static_cast<int>(c.size());
  return BundleConnectionForm::make(
      1, m,
      [c, m](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        V out = V::Zero(1);
        for (int i = 0; i < m; ++i) out[0] += z[1 + m + i] * c[i];
        return out;
      },
      "<c,p>");
}

double connection_form_defect(const BundleConnectionForm& G, const EmbeddedManifold& M, const EmbeddedManifold& N,
                              const std::vector<Vec<double>>& xs, const std::vector<Vec<double>>& ys,
                              std::uint64_t seed) {
  const int m = G.base_dim;
  const int n = G.fibre_dim;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      Vec<double> p(m), q(m);
      for (int i = 0; i < m; ++i) {
        p[i] = gauss(rng);
        q[i] = gauss(rng);
      }
      p = M.projector(x) * p;
      q = M.projector(x) * q;
      const double a = gauss(rng);
      auto eval = [&](const Vec<double>& v) {
        Vec<double> z(n + 2 * m);
        z << y, x, v;
        return Vec<double>(G.G(z));
      };
      const Vec<double> gp = eval(p);
      worst = std::max(worst, (gp - N.projector(y) * gp).lpNorm<Eigen::Infinity>());
      const Vec<double> lin = eval(Vec<double>(p + a * q)) - gp - a * eval(q);
      worst = std::max(worst, lin.lpNorm<Eigen::Infinity>());
    }
  return worst;
}

VfOneForm lift_one_form(const VfOneForm& F, const BundleConnectionForm& G) {
  const int m = F.ambient_dim();
  const int n = G.fibre_dim;
  require(G.base_dim == m, "lift_one_form: connection form expects base R^" + std::to_string(G.base_dim));
  std::vector<VectorField> out;
  for (int i = 0; i < F.dim_u(); ++i) {
    VectorField Fi = F[i];
    SmoothMap g = G.G;
    out.push_back(VectorField::make(
        m + n,
        [Fi, g, m, n](const auto& z) {
          using V = std::decay_t<decltype(z)>;
          const V x = z.head(m);
          const V fx = Fi(x);
          V in(n + 2 * m);
          in << z.tail(n), x, fx;
          V res(m + n);
          res << fx, g(in);
          return res;
        },
        "H(" + Fi.name() + ")", Fi.regularity()));
  }
  return VfOneForm(std::move(out));
}

RoughIntegrator lift_through_connection(const RoughIntegrator& theta, const BundleConnectionForm& G, ManifoldPtr N,
                                        const Vec<double>& y0, int substeps) {
  require(N != nullptr, "lift_through_connection: fibre manifold missing");
  require(N->ambient_dim() == G.fibre_dim, "lift_through_connection: fibre dimension mismatch");
  require(N->contains(y0), "lift_through_connection: y0 is off " + N->name());
  std::vector<IntegratorSegment> segs;
  Vec<double> y = y0;
  for (const auto& s : theta.segments()) {
    IntegratorSegment out;
    out.M = make_product({s.M, N});
    out.F = lift_one_form(s.F, G);
    out.X = s.X;
    out.t_offset = s.t_offset;
    Vec<double> z0(s.M->ambient_dim() + N->ambient_dim());
    z0 << s.path.points.front(), y;
    SolveOptions opts;
    opts.mesh = s.path.times;
    opts.substeps = substeps;
    out.path = solve_rde(*out.M, *s.X, out.F, z0, opts);
    y = out.path.back().tail(N->ambient_dim());
    const bool stop = out.path.blow_up;
    segs.push_back(std::move(out));
    if (stop) break;
  }
  return RoughIntegrator(std::move(segs));
}

double integrate_one_form(const RoughIntegrator& theta, const BundleConnectionForm& alpha) {
  require(alpha.fibre_dim == 1, "integrate_one_form: expects a scalar one-form");
  const auto lifted = lift_through_connection(theta, alpha, make_plane(1), Vec<double>::Zero(1));
  return lifted.end()[lifted.end().size() - 1];
}

RoughIntegrator pushforward(const RoughIntegrator& theta, const Diffeomorphism& g, ManifoldPtr M_image) {
  std::vector<IntegratorSegment> segs;
  for (const auto& s : theta.segments()) {
    IntegratorSegment out;
    out.M = M_image ? M_image : s.M;
    std::vector<VectorField> fs;
    for (const auto& f : s.F.fields()) fs.push_back(pushforward_field(g, f));
    out.F = VfOneForm(std::move(fs));
    out.X = s.X;
    out.t_offset = s.t_offset;
    out.path = s.path;
    for (auto& x : out.path.points) {
      Vec<double> gx = g.forward(x);
      const double err = (Vec<double>(g.inverse(gx)) - x).lpNorm<Eigen::Infinity>();
      if (!(err <= 1e-8 * std::max(1.0, x.lpNorm<Eigen::Infinity>()))) {
        std::ostringstream os;
        os << "pushforward: g is not invertible along the path (inverse defect " << err << ")";
        throw ContractViolation(os.str());
      }
      x = std::move(gx);
    }
    segs.push_back(std::move(out));
  }
  return RoughIntegrator(std::move(segs));
}

RoughIntegrator resolve(const RoughIntegrator& theta, const Vec<double>& x0, int substeps) {
  std::vector<IntegratorSegment> segs;
  Vec<double> x = x0;
  for (const auto& s : theta.segments()) {
    IntegratorSegment out = s;
    SolveOptions opts;
    opts.mesh = s.path.times;
    opts.substeps = substeps;
    out.path = solve_rde(*s.M, *s.X, s.F, x, opts);
    x = out.path.back();
    const bool stop = out.path.blow_up;
    segs.push_back(std::move(out));
    if (stop) break;
  }
  return RoughIntegrator(std::move(segs));
}

double sup_distance(const RDEPath& a, const RDEPath& b) {
  require(a.size() == b.size(), "sup_distance: paths have different lengths");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(std::abs(a.times[i] - b.times[i]) <= 1e-12, "sup_distance: time stamps differ");
    d = std::max(d, (a.points[i] - b.points[i]).norm());
  }
  return d;
}

// ----------------------------------------------------------------- Davie

SmoothMap coordinate_and_quadratic_tests(int m) {
  const int out = m + m * (m + 1) / 2;
  return SmoothMap::make(
      m, out,
      [m, out](const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V f(out);
        int k = 0;
        for (int i = 0; i < m; ++i) f[k++] = x[i];
        for (int i = 0; i < m; ++i)
          for (int j = i; j < m; ++j) f[k++] = x[i] * x[j];
        return f;
      },
      "tests");
}

DavieReport davie_residual(const RDEPath& path, const VfOneForm& F, const RoughPathDriver& X,
                           const SmoothMap& tests, int max_log2_window, double roundoff_floor) {
  require(path.size() >= 2, "davie_residual: path needs at least two samples");
  require(path.times.front() >= 0.0 && path.times.back() <= X.horizon(),
          "davie_residual: path times lie outside the driver's interval");
  DavieReport rep;
  for (int j = 0; j <= max_log2_window; ++j) {
    const std::size_t w = std::size_t{1} << j;
    if (w >= path.size()) break;
    const std::size_t count = (path.size() - 1) / w;
    const std::size_t stride = std::max<std::size_t>(1, count / 64);  // at most ~64 windows per scale
    double worst = 0.0;
    double len = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < count; c += stride) {
      const std::size_t i = c * w;
      const double s = path.times[i];
      const double t = path.times[i + w];
      const TensorOperator op(F, X.eval(s, t));
      const Vec<double> predicted = op.apply(&tests, path.points[i]);
      const Vec<double> actual = tests(path.points[i + w]);
      worst = std::max(worst, (actual - predicted).lpNorm<Eigen::Infinity>());
      len += t - s;
      ++used;
    }
    rep.window_lengths.push_back(len / used);
    rep.residuals.push_back(worst);
    rep.max_residual = std::max(rep.max_residual, worst);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
    if (rep.residuals[i] <= roundoff_floor) continue;
    const double lx = std::log(rep.window_lengths[i]);
    const double ly = std::log(rep.residuals[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  rep.exact = m == 0;
  if (m >= 2) {
    rep.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  } else {
    rep.exponent = rep.exact ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

DavieReport davie_residual(const RoughIntegrator& theta, const SmoothMap* tests, int max_log2_window) {
  DavieReport worst;
  bool first = true;
  for (const auto& s : theta.segments()) {
    const SmoothMap t = tests ? *tests : coordinate_and_quadratic_tests(s.M->ambient_dim());
    DavieReport r = davie_residual(s.path, s.F, *s.X, t, max_log2_window);
    const auto rank = [](const DavieReport& d) { return d.exact ? INFINITY : (std::isnan(d.exponent) ? -INFINITY : d.exponent); };
    if (first || rank(r) < rank(worst)) worst = std::move(r);
    first = false;
  }
  return worst;
}

nlohmann::json path_metadata(const RDEPath& path) {
  nlohmann::json j;
  j["points"] = path.size();
  j["steps_per_unit"] = path.steps_per_unit;
  j["substeps"] = path.substeps;
  j["p"] = path.p;
  j["level"] = path.level;
  j["scheme"] = path.scheme;
  j["blow_up"] = {{"flag", path.blow_up}, {"time", path.blow_up ? nlohmann::json(path.blow_up_time) : nlohmann::json()}};
  return j;
}

}  // namespace roughman
