#include "roughman/cartan.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace roughman {

namespace {

void require_base_match(const FrameBundle& bundle, const Vec<double>& e0, const Vec<double>& x0, const char* who) {
  bundle.validate(e0, 1e-8);
  require(x0.size() == bundle.base_dim(), std::string(who) + ": base dimension mismatch");
  const double gap = (bundle.base(e0) - x0).lpNorm<Eigen::Infinity>();
  if (!(gap <= 1e-8)) {
    std::ostringstream os;
    os << who << ": frame sits over a different point (distance " << gap << ")";
    throw ContractViolation(os.str());
  }
}

std::vector<double> shifted(const std::vector<double>& times) {
  std::vector<double> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) out[i] = times[i] - times.front();
  return out;
}

std::size_t tensor_state_size(int d, int level) {
  std::size_t n = 0;
  std::size_t p = 1;
  for (int k = 1; k <= level; ++k) {
    p *= static_cast<std::size_t>(d);
    n += p;
  }
  return n;
}

TruncatedTensor tensor_from_state(const Vec<double>& z, int d, int level) {
  TruncatedTensor t = TruncatedTensor::unit(d, level);
  std::size_t off = 0;
  for (int k = 1; k <= level; ++k) {
    auto dk = t.degree(k);
    for (std::size_t i = 0; i < dk.size(); ++i) dk[i] = z[static_cast<Eigen::Index>(off + i)];
    off += dk.size();
  }
  return t;
}

// G'(y, e; P) = G(y, πe; π_*P) for a connection form G on M×N.
BundleConnectionForm pull_to_bundle(const BundleConnectionForm& G, int state_dim) {
  const int m = G.base_dim;
  const int nf = G.fibre_dim;
  SmoothMap g = G.G;
  return BundleConnectionForm::make(
      nf, state_dim,
      [g, m, nf, state_dim](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        V in(nf + 2 * m);
        in << z.head(nf), z.segment(nf, m), z.segment(nf + state_dim, m);
        return V(g(in));
      },
      "G∘π");
}

}  // namespace

RoughIntegrator parallel_transport(const RoughIntegrator& theta, const FrameBundle& bundle, const Vec<double>& e0,
                                   int substeps) {
  require_base_match(bundle, e0, theta.start(), "parallel_transport");
  std::vector<IntegratorSegment> segs;
  Vec<double> e = e0;
  for (const auto& s : theta.segments()) {
    IntegratorSegment out;
    out.M = bundle.manifold();
    out.F = bundle.horizontal_lift(s.F);
    out.X = s.X;
    out.t_offset = s.t_offset;
    SolveOptions opts;
    opts.mesh = s.path.times;
    opts.substeps = substeps;
    out.path = solve_rde(*out.M, *s.X, out.F, e, opts);
    e = out.path.back();
    const bool stop = out.path.blow_up;
    segs.push_back(std::move(out));
    if (stop) break;
  }
  return RoughIntegrator(std::move(segs));
}

double holonomy_angle(const SurfaceFrameBundle& bundle, const Vec<double>& e_start, const Vec<double>& e_end) {
  const FrameBundlePoint a = bundle.unpack(e_start);
  const Vec<double> e1_end = e_end.tail(3);
  return std::atan2(e1_end.dot(a.frame.col(1)), e1_end.dot(a.frame.col(0)));
}

std::vector<std::vector<double>> latitude_loop(double theta, int n, double radius) {
  require(n >= 3, "latitude_loop: needs at least three segments");
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i == n ? 0 : i) / n;
    pts.push_back({radius * std::sin(theta) * std::cos(phi), radius * std::sin(theta) * std::sin(phi),
                   radius * std::cos(theta)});
  }
  return pts;
}

Development antidevelop(const FrameBundle& bundle, const std::vector<double>& times,
                        const std::vector<std::vector<double>>& gamma, const Vec<double>& e0, int substeps) {
  require(times.size() == gamma.size() && times.size() >= 2, "antidevelop: need matching times and samples");
  const auto base = bundle.base_manifold();
  const int m = base->ambient_dim();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    require(static_cast<int>(gamma[i].size()) == m, "antidevelop: sample has the wrong dimension");
    const Vec<double> g = Eigen::Map<const Vec<double>>(gamma[i].data(), m);
    if (!(base->defect(g) <= 1e-8)) {
      std::ostringstream os;
      os << "antidevelop: sample " << i << " is off " << base->name() << " (defect " << base->defect(g) << ")";
      throw ContractViolation(os.str());
    }
  }
  require_base_match(bundle, e0, Eigen::Map<const Vec<double>>(gamma.front().data(), m), "antidevelop");
  auto Qmap = base->projection_map();
  require(Qmap.has_value(), "antidevelop: base manifold has no projection map");

  const int n = bundle.state_dim();
  const int d = bundle.model_dim();
  SmoothMap Q = *Qmap;
  SmoothMap H = bundle.horizontal_map();
  SmoothMap Einv = bundle.inverse_frame_map();
  std::vector<VectorField> fields;
  for (int i = 0; i < m; ++i) {
    fields.push_back(VectorField::make(
        n + d,
        [Q, H, Einv, m, n, d, i](const auto& z) {
          using V = std::decay_t<decltype(z)>;
          const V e = z.head(n);
          V qin = V::Zero(2 * m);
          qin.head(m) = e.head(m);
          qin[m + i] = 1.0;
          V ein(n + m);
          ein << e, Q(qin);
          const V a = Einv(ein);
          V hin(n + d);
          hin << e, a;
          V out(n + d);
          out << H(hin), a;
          return out;
        },
        "anti" + std::to_string(i + 1)));
  }
  const VfOneForm F(std::move(fields));
  const auto M = make_product({bundle.manifold(), make_plane(d)});
  const auto local = shifted(times);
  const auto X = lift_smooth_path(local, gamma, 2.0);
  SolveOptions opts;
  opts.mesh = local;
  opts.substeps = substeps;
  Vec<double> z0(n + d);
  z0 << e0, Vec<double>::Zero(d);
  const RDEPath path = solve_rde(*M, *X, F, z0, opts);
  require(!path.blow_up, "antidevelop: solution exploded");
  Development out;
  out.times = times;
  for (const auto& z : path.points) {
    out.frames.push_back(z.head(n));
    out.u.push_back(z.tail(d));
  }
  return out;
}

Development develop(const FrameBundle& bundle, const std::vector<double>& times,
                    const std::vector<std::vector<double>>& u, const Vec<double>& e0, int substeps) {
  require(times.size() == u.size() && times.size() >= 2, "develop: need matching times and samples");
  const int d = bundle.model_dim();
  for (const auto& ui : u) require(static_cast<int>(ui.size()) == d, "develop: sample has the wrong dimension");
  for (double c : u.front()) require(std::abs(c) <= 1e-12, "develop: u must start at 0");
  bundle.validate(e0, 1e-8);
  const auto local = shifted(times);
  const auto X = lift_smooth_path(local, u, 2.0);
  SolveOptions opts;
  opts.mesh = local;
  opts.substeps = substeps;
  const RDEPath path = solve_rde(*bundle.manifold(), *X, bundle.canonical_horizontal_form(), e0, opts);
  Development out;
  out.times.assign(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(path.size()));
  for (std::size_t i = 0; i < path.size(); ++i) {
    out.frames.push_back(path.points[i]);
    out.u.push_back(Eigen::Map<const Vec<double>>(u[i].data(), d));
  }
  return out;
}

CanonicalRepresentation canonical_representation(const RoughIntegrator& theta, const FrameBundle& bundle,
                                                 const Vec<double>& e0, int substeps) {
  require_base_match(bundle, e0, theta.start(), "canonical_representation");
  const int n = bundle.state_dim();
  const int m = bundle.base_dim();
  const int d = bundle.model_dim();
  int level = 1;
  double p = 1.0;
  for (const auto& s : theta.segments()) {
    level = std::max(level, s.X->level());
    p = std::max(p, s.X->p());
  }
  const auto zdim = static_cast<int>(tensor_state_size(d, level));
  SmoothMap H = bundle.horizontal_map();
  SmoothMap Einv = bundle.inverse_frame_map();
  const auto M = make_product({bundle.manifold(), make_plane(zdim)});

  CanonicalRepresentation rep;
  rep.e0 = e0;
  rep.bundle_name = bundle.name();
  std::vector<IntegratorSegment> frame_segs;
  std::vector<double> global_times;
  Vec<double> state(n + zdim);
  state << e0, Vec<double>::Zero(zdim);
  for (const auto& s : theta.segments()) {
    std::vector<VectorField> fields;
    for (int i = 0; i < s.F.dim_u(); ++i) {
      VectorField Fi = s.F[i];
      fields.push_back(VectorField::make(
          n + zdim,
          [H, Einv, Fi, n, m, d, zdim, level](const auto& z) {
            using V = std::decay_t<decltype(z)>;
            const V e = z.head(n);
            V ein(n + m);
            ein << e, Fi(V(e.head(m)));
            const V a = Einv(ein);
            V hin(n + d);
            hin << e, a;
            V out(n + zdim);
            out.head(n) = H(hin);
            // (Z ⊗ a)_k = Z_{k-1} ⊗ a with Z_0 = 1.
            std::size_t prev_off = 0, prev_size = 1, off = 0;
            for (int k = 1; k <= level; ++k) {
              const std::size_t size = prev_size * static_cast<std::size_t>(d);
              for (std::size_t idx = 0; idx < prev_size; ++idx)
                for (int b = 0; b < d; ++b) {
                  const auto pos = static_cast<Eigen::Index>(n + off + idx * d + b);
                  if (k == 1) {
                    out[pos] = a[b];
                  } else {
                    out[pos] = z[static_cast<Eigen::Index>(n + prev_off + idx)] * a[b];
                  }
                }
              prev_off = off;
              prev_size = size;
              off += size;
            }
            return out;
          },
          "canon(" + Fi.name() + ")"));
    }
    const VfOneForm F(std::move(fields));
    SolveOptions opts;
    opts.mesh = s.path.times;
    opts.substeps = substeps;
    const RDEPath path = solve_rde(*M, *s.X, F, state, opts);

    IntegratorSegment fs;
    fs.M = bundle.manifold();
    fs.F = bundle.horizontal_lift(s.F);
    fs.X = s.X;
    fs.t_offset = s.t_offset;
    fs.path = path;
    for (auto& z : fs.path.points) z = Vec<double>(z.head(n));
    frame_segs.push_back(std::move(fs));

    for (std::size_t i = (global_times.empty() ? 0 : 1); i < path.size(); ++i) {
      global_times.push_back(s.t_offset + path.times[i]);
      rep.Z_path.push_back(tensor_from_state(path.points[i].tail(zdim), d, level));
    }
    state = path.back();
    if (path.blow_up) break;
  }
  rep.frames = RoughIntegrator(std::move(frame_segs));

  std::vector<TruncatedTensor> logs;
  logs.reserve(rep.Z_path.size() - 1);
  for (std::size_t k = 0; k + 1 < rep.Z_path.size(); ++k) {
    const TruncatedTensor inc = tensor_mul(group_inverse(rep.Z_path[k]), rep.Z_path[k + 1]);
    logs.push_back(lie_projection(tensor_log(inc)));
  }
  require(!logs.empty(), "canonical_representation: the integrator has no steps");
  rep.Z = std::make_shared<const PiecewiseLogLinearDriver>(global_times, std::move(logs), p, "canonical_Z");
  return rep;
}

RepresentationReport verify_representation(const RoughIntegrator& theta, const CanonicalRepresentation& rep,
                                           const FrameBundle& bundle, const BundleConnectionForm& G,
                                           ManifoldPtr N, const Vec<double>& y0, double tol, int substeps) {
  require(N && N->ambient_dim() == G.fibre_dim, "verify_representation: fibre manifold mismatch");
  require(G.base_dim == bundle.base_dim(), "verify_representation: connection form expects another base");
  const int n = bundle.state_dim();
  const BundleConnectionForm Gb = pull_to_bundle(G, n);
  const auto M = make_product({bundle.manifold(), N});

  // 𝔖, driven by X segment by segment.
  RDEPath lhs;
  Vec<double> state(n + G.fibre_dim);
  state << rep.e0, y0;
  for (const auto& s : theta.segments()) {
    const VfOneForm F = lift_one_form(bundle.horizontal_lift(s.F), Gb);
    SolveOptions opts;
    opts.mesh = s.path.times;
    opts.substeps = substeps;
    const RDEPath path = solve_rde(*M, *s.X, F, state, opts);
    for (std::size_t i = (lhs.times.empty() ? 0 : 1); i < path.size(); ++i) {
      lhs.times.push_back(s.t_offset + path.times[i]);
      lhs.points.push_back(path.points[i]);
    }
    state = path.back();
    if (path.blow_up) break;
  }

  // 𝔖̄, driven by Z over E.
  SolveOptions opts;
  opts.mesh = rep.Z->times();
  opts.substeps = substeps;
  Vec<double> start(n + G.fibre_dim);
  start << rep.e0, y0;
  const RDEPath rhs =
      solve_rde(*M, *rep.Z, lift_one_form(bundle.canonical_horizontal_form(), Gb), start, opts);

  RepresentationReport out;
  out.tol = tol;
  const std::size_t count = std::min(lhs.size(), rhs.size());
  for (std::size_t i = 0; i < count; ++i) {
    out.distance = std::max(out.distance, (lhs.points[i] - rhs.points[i]).norm());
    out.frame_defect = std::max(out.frame_defect, bundle.frame_defect(lhs.points[i].head(n)));
    out.frame_defect = std::max(out.frame_defect, bundle.frame_defect(rhs.points[i].head(n)));
  }
  if (lhs.size() != rhs.size()) out.distance = INFINITY;
  ValidateOptions vo;
  vo.triples = 200;
  vo.tol = 1e-8;
  out.z_report = validate_driver(*rep.Z, rep.Z->times(), vo);
  out.pass = out.distance < tol;
  return out;
}

RepresentationReport verify_representation(const RoughIntegrator& theta, const FrameBundle& bundle,
                                           const BundleConnectionForm& G, ManifoldPtr N, const Vec<double>& e0,
                                           const Vec<double>& y0, double tol, int substeps) {
  const auto rep = canonical_representation(theta, bundle, e0, substeps);
  return verify_representation(theta, rep, bundle, G, std::move(N), y0, tol, substeps);
}

nlohmann::json to_json(const CanonicalRepresentation& rep) {
  nlohmann::json j;
  j["bundle"] = rep.bundle_name;
  j["e0"] = std::vector<double>(rep.e0.data(), rep.e0.data() + rep.e0.size());
  j["p"] = rep.Z->p();
  j["times"] = rep.Z->times();
  nlohmann::json inc = nlohmann::json::array();
  for (std::size_t k = 0; k + 1 < rep.Z_path.size(); ++k)
    inc.push_back(to_json(tensor_mul(group_inverse(rep.Z_path[k]), rep.Z_path[k + 1])));
  j["increments"] = std::move(inc);
  return j;
}

}  // namespace roughman
