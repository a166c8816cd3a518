#include "roughman/frame_bundle.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "roughman/linalg.hpp"

namespace roughman {

// ------------------------------------------------------------ FrameBundle

Vec<double> FrameBundle::default_state(const Vec<double>& x) const {
  const auto M = base_manifold();
  require(M->contains(x), "default_state: base point is off " + M->name());
  const int m = M->ambient_dim();
  const int d = model_dim();
  const Mat<double> Q = M->projector(x);
  Mat<double> E(m, d);
  int found = 0;
  for (int i = 0; i < m && found < d; ++i) {
    Vec<double> q = Q.col(i);
    for (int j = 0; j < found; ++j) q -= E.col(j).dot(q) * E.col(j);
    const double n = q.norm();
    if (n > 1e-6) E.col(found++) = q / n;
  }
  require(found == d, "default_state: tangent space too small");
  return pack({x, E});
}

void FrameBundle::validate(const Vec<double>& state, double tol) const {
  require(state.size() == state_dim(), name() + ": state has dimension " + std::to_string(state.size()) +
                                           ", expected " + std::to_string(state_dim()));
  const double d = frame_defect(state);
  if (!(d <= tol)) {
    std::ostringstream os;
    os << name() << ": invalid frame point (defect " << d << ")";
    throw ContractViolation(os.str());
  }
}

Vec<double> FrameBundle::horizontal_field(const Vec<double>& state, const Vec<double>& a) const {
  validate(state);
  require(a.size() == model_dim(), "horizontal_field: a has the wrong dimension");
  Vec<double> z(state_dim() + model_dim());
  z << state, a;
  return horizontal_map()(z);
}

VectorField FrameBundle::canonical_horizontal(int i) const {
  const int d = model_dim();
  const int n = state_dim();
  require(i >= 0 && i < d, "canonical_horizontal: index out of range");
  SmoothMap H = horizontal_map();
  return VectorField::make(
      n,
      [H, n, d, i](const auto& e) {
        using V = std::decay_t<decltype(e)>;
        V z = V::Zero(n + d);
        z.head(n) = e;
        z[n + i] = 1.0;
        return V(H(z));
      },
      "H" + std::to_string(i + 1));
}

VfOneForm FrameBundle::canonical_horizontal_form() const {
  std::vector<VectorField> fs;
  for (int i = 0; i < model_dim(); ++i) fs.push_back(canonical_horizontal(i));
  return VfOneForm(std::move(fs));
}

VfOneForm FrameBundle::horizontal_lift(const VfOneForm& F) const {
  const int m = base_dim();
  const int d = model_dim();
  const int n = state_dim();
  require(F.ambient_dim() == m, "horizontal_lift: one-form lives on R^" + std::to_string(F.ambient_dim()) +
                                    ", base is R^" + std::to_string(m));
  SmoothMap H = horizontal_map();
  SmoothMap Einv = inverse_frame_map();
  std::vector<VectorField> out;
  for (int i = 0; i < F.dim_u(); ++i) {
    VectorField Fi = F[i];
    out.push_back(VectorField::make(
        n,
        [H, Einv, Fi, m, d, n](const auto& e) {
          using V = std::decay_t<decltype(e)>;
          const V x = e.head(m);
          V zi(n + m);
          zi << e, Fi(x);
          const V a = Einv(zi);
          V zh(n + d);
          zh << e, a;
          return V(H(zh));
        },
        "lift(" + Fi.name() + ")"));
  }
  return VfOneForm(std::move(out));
}

// ------------------------------------------------------ SurfaceFrameBundle

namespace {

using Surface = SurfaceFrameBundle::Surface;

// n(x) and Dn(x)[v] for the two surfaces.
template <class V>
V normal_of(Surface s, double r, const V& x) {
  V n(3);
  if (s == Surface::Plane) {
    n << 0.0, 0.0, 1.0;
  } else {
    n = x / r;
  }
  return n;
}

template <class V>
V cross3(const V& a, const V& b) {
  V c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

template <class S>
Mat<S> surface_frame_jacobian(Surface s, double r, const Vec<S>& x, const Vec<S>& e1) {
  Mat<S> J = Mat<S>::Zero(3, 6);
  if (s == Surface::Plane) {
    J(0, 2) = 1.0;
    J(1, 5) = 1.0;
  } else {
    using std::sqrt;
    const S nx = sqrt(x.dot(x));
    for (int k = 0; k < 3; ++k) {
      J(0, k) = x[k] / nx;
      J(1, k) = e1[k] / r;
      J(1, 3 + k) = x[k] / r;
    }
  }
  for (int k = 0; k < 3; ++k) J(2, 3 + k) = e1[k] * 2.0;
  return J;
}

class SurfaceFrameManifold final : public ConstraintManifold {
 public:
  SurfaceFrameManifold(Surface s, double r, ManifoldPtr base) : s_(s), r_(r), base_(std::move(base)) {}
  std::string name() const override { return s_ == Surface::Plane ? "OM(plane)" : "OM(sphere)"; }
  int ambient_dim() const override { return 6; }
  int intrinsic_dim() const override { return 3; }

  std::optional<SmoothMap> projection_map() const override {
    const Surface s = s_;
    const double r = r_;
    return SmoothMap::make(
        12, 6,
        [s, r](const auto& z) {
          using V = std::decay_t<decltype(z)>;
          using S = typename V::Scalar;
          const V x = z.head(3);
          const V e1 = z.segment(3, 3);
          const V v = z.tail(6);
          const Mat<S> J = surface_frame_jacobian<S>(s, r, x, e1);
          const Mat<S> JJt = J * J.transpose();
          const V lam = solve_dense<S>(JJt, V(J * v));
          return V(v - J.transpose() * lam);
        },
        name() + ".Q");
  }

 protected:
  Vec<double> constraints(const Vec<double>& y) const override {
    const Vec<double> x = y.head(3);
    const Vec<double> e1 = y.tail(3);
    Vec<double> c(3);
    c[0] = s_ == Surface::Plane ? x[2] : x.norm() - r_;
    c[1] = e1.dot(normal_of(s_, r_, x));
    c[2] = e1.squaredNorm() - 1.0;
    return c;
  }
  Mat<double> constraint_jacobian(const Vec<double>& y) const override {
    return surface_frame_jacobian<double>(s_, r_, y.head(3), y.tail(3));
  }
  Vec<double> rough_retract(const Vec<double>& y) const override {
    Vec<double> out(6);
    const Vec<double> x = base_->retract(y.head(3));
    const Vec<double> n = normal_of(s_, r_, x).normalized();
    Vec<double> e1 = y.tail(3);
    e1 -= e1.dot(n) * n;
    const double len = e1.norm();
    require(len > 0.0, name() + ": frame vector is normal to the surface");
    out << x, e1 / len;
    return out;
  }

 private:
  Surface s_;
  double r_;
  ManifoldPtr base_;
};

}  // namespace

SurfaceFrameBundle::SurfaceFrameBundle(Surface s, double radius) : surface_(s), radius_(radius) {
  require(radius > 0.0, "SurfaceFrameBundle: radius must be positive");
  if (s == Surface::Plane) {
    base_ = std::make_shared<PlaneInSpace>();
  } else {
    base_ = std::make_shared<Sphere>(radius);
  }
  bundle_ = std::make_shared<SurfaceFrameManifold>(s, radius, base_);

  horizontal_ = SmoothMap::make(
      8, 6,
      [s, radius](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        const V x = z.head(3);
        const V e1 = z.segment(3, 3);
        const V n = normal_of(s, radius, x);
        const V e2 = cross3(n, e1);
        const V v = e1 * z[6] + e2 * z[7];
        V out(6);
        out.head(3) = v;
        if (s == Surface::Plane) {
          out.tail(3).setZero();
        } else {
          // ė₁ = −(e₁·Dn[v]) n with Dn[v] = v/r.
          out.tail(3) = n * (-(e1.dot(v)) / radius);
        }
        return out;
      },
      "H");

  inverse_ = SmoothMap::make(
      9, 2,
      [s, radius](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        const V x = z.head(3);
        const V e1 = z.segment(3, 3);
        const V v = z.tail(3);
        const V e2 = cross3(normal_of(s, radius, x), e1);
        V a(2);
        a[0] = e1.dot(v);
        a[1] = e2.dot(v);
        return a;
      },
      "e^-1");
}

std::shared_ptr<const SurfaceFrameBundle> SurfaceFrameBundle::plane() {
  return std::shared_ptr<const SurfaceFrameBundle>(new SurfaceFrameBundle(Surface::Plane, 1.0));
}

std::shared_ptr<const SurfaceFrameBundle> SurfaceFrameBundle::sphere(double radius) {
  return std::shared_ptr<const SurfaceFrameBundle>(new SurfaceFrameBundle(Surface::Sphere, radius));
}

std::string SurfaceFrameBundle::name() const { return surface_ == Surface::Plane ? "OM(plane)" : "OM(sphere)"; }

Vec<double> SurfaceFrameBundle::pack(const FrameBundlePoint& p) const {
  require(p.x.size() == 3 && p.frame.rows() == 3 && p.frame.cols() >= 1, "SurfaceFrameBundle::pack: shape");
  Vec<double> s(6);
  s << p.x, p.frame.col(0);
  return s;
}

FrameBundlePoint SurfaceFrameBundle::unpack(const Vec<double>& state) const {
  require(state.size() == 6, "SurfaceFrameBundle::unpack: expected 6 coordinates");
  FrameBundlePoint p;
  p.x = state.head(3);
  p.frame.resize(3, 2);
  const Vec<double> e1 = state.tail(3);
  p.frame.col(0) = e1;
  p.frame.col(1) = cross3(normal_of(surface_, radius_, p.x), e1);
  return p;
}

double SurfaceFrameBundle::frame_defect(const Vec<double>& state) const {
  if (state.size() != 6 || !state.allFinite()) return INFINITY;
  const Vec<double> x = state.head(3);
  const Vec<double> e1 = state.tail(3);
  const Vec<double> n = normal_of(surface_, radius_, x);
  double d = base_->defect(x);
  d = std::max(d, std::abs(e1.dot(n)));
  d = std::max(d, std::abs(e1.norm() - 1.0));
  return d;
}

VectorField SurfaceFrameBundle::vertical_field() const {
  const Surface s = surface_;
  const double r = radius_;
  return VectorField::make(
      6,
      [s, r](const auto& e) {
        using V = std::decay_t<decltype(e)>;
        V out = V::Zero(6);
        const V x = e.head(3);
        const V e1 = e.tail(3);
        out.tail(3) = cross3(normal_of(s, r, x), e1);
        return out;
      },
      "V12");
}

Eigen::Matrix3d SurfaceFrameBundle::frame_matrix(const Vec<double>& state) const {
  require(surface_ == Surface::Sphere, "frame_matrix: sphere frames only");
  const FrameBundlePoint p = unpack(state);
  Eigen::Matrix3d g;
  g.col(0) = p.frame.col(0);
  g.col(1) = p.frame.col(1);
  g.col(2) = p.x / radius_;
  return g;
}

double SurfaceFrameBundle::analytic_curvature() const {
  return surface_ == Surface::Plane ? 0.0 : 1.0 / (radius_ * radius_);
}

double bracket_vertical_coefficient(const SurfaceFrameBundle& bundle, const Vec<double>& x, double h,
                                    double* remainder) {
  const Vec<double> e = bundle.default_state(x);
  const VectorField H1 = bundle.canonical_horizontal(0);
  const VectorField H2 = bundle.canonical_horizontal(1);
  const Vec<double> b = lie_bracket(H1, H2, e, h);
  const Vec<double> v = bundle.vertical_field()(e);
  const double c = b.dot(v) / v.squaredNorm();
  if (remainder != nullptr) *remainder = (b - c * v).lpNorm<Eigen::Infinity>();
  return c;
}

double curvature_scalar(const FrameBundle& bundle, const Vec<double>& x, double h) {
  const auto* surface = dynamic_cast<const SurfaceFrameBundle*>(&bundle);
  require(surface != nullptr, "curvature_scalar: " + bundle.name() + " is not the frame bundle of a surface");
  return kCurvatureBracketSign * bracket_vertical_coefficient(*surface, x, h);
}

// --------------------------------------------------------- FlatFrameBundle

FlatFrameBundle::FlatFrameBundle(int d) : d_(d) {
  require(d >= 1, "FlatFrameBundle: dimension must be positive");
  base_ = std::make_shared<Euclidean>(d);
  bundle_ = std::make_shared<Euclidean>(d + d * d, "gl_frames");
  horizontal_ = SmoothMap::make(
      d + d * d + d, d + d * d,
      [d](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        V out = V::Zero(d + d * d);
        for (int c = 0; c < d; ++c)
          for (int r = 0; r < d; ++r) out[r] += z[d + d * c + r] * z[d + d * d + c];
        return out;
      },
      "H");
  inverse_ = SmoothMap::make(
      d + d * d + d, d,
      [d](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        using S = typename V::Scalar;
        Mat<S> E(d, d);
        for (int c = 0; c < d; ++c)
          for (int r = 0; r < d; ++r) E(r, c) = z[d + d * c + r];
        return V(solve_dense<S>(E, V(z.tail(d))));
      },
      "e^-1");
}

Vec<double> FlatFrameBundle::pack(const FrameBundlePoint& p) const {
  require(p.x.size() == d_ && p.frame.rows() == d_ && p.frame.cols() == d_, "FlatFrameBundle::pack: shape");
  Vec<double> s(d_ + d_ * d_);
  s.head(d_) = p.x;
  for (int c = 0; c < d_; ++c) s.segment(d_ + d_ * c, d_) = p.frame.col(c);
  return s;
}

FrameBundlePoint FlatFrameBundle::unpack(const Vec<double>& state) const {
  require(state.size() == state_dim(), "FlatFrameBundle::unpack: wrong dimension");
  FrameBundlePoint p;
  p.x = state.head(d_);
  p.frame.resize(d_, d_);
  for (int c = 0; c < d_; ++c) p.frame.col(c) = state.segment(d_ + d_ * c, d_);
  return p;
}

double FlatFrameBundle::frame_defect(const Vec<double>& state) const {
  if (state.size() != state_dim() || !state.allFinite()) return INFINITY;
  const Mat<double> E = unpack(state).frame;
  Eigen::JacobiSVD<Mat<double>> svd(E);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  return smin > 1e-12 * std::max(1.0, smax) ? 0.0 : 1.0;
}

}  // namespace roughman
