#include "roughman/manifold.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace roughman {

Vec<double> EmbeddedManifold::tangent_project(const Vec<double>& y, const Vec<double>& v) const {
  require(y.size() == ambient_dim() && v.size() == ambient_dim(),
          "tangent_project: expected ambient dimension " + std::to_string(ambient_dim()));
  const double d = defect(y);
  if (!(d <= 1e-8)) {
    std::ostringstream os;
    os << "tangent_project: point is off " << name() << " (defect " << d << ")";
    throw ContractViolation(os.str());
  }
  return projector(y) * v;
}

// ---------------------------------------------------------------- Euclidean

Euclidean::Euclidean(int dim, std::string name) : dim_(dim), name_(std::move(name)) {
  require(dim >= 1, "Euclidean: dimension must be positive");
  if (name_.empty()) name_ = dim == 2 ? "plane" : "euclidean";
}

Mat<double> Euclidean::projector(const Vec<double>&) const { return Mat<double>::Identity(dim_, dim_); }

double Euclidean::defect(const Vec<double>& y) const {
  if (y.size() != dim_) return INFINITY;
  return y.allFinite() ? 0.0 : INFINITY;
}

std::optional<SmoothMap> Euclidean::projection_map() const {
  const int m = dim_;
  return SmoothMap::make(
      2 * m, m, [m](const auto& z) { return std::decay_t<decltype(z)>(z.tail(m)); }, "euclidean.Q");
}

// ------------------------------------------------------ ConstraintManifold

Mat<double> ConstraintManifold::projector(const Vec<double>& y) const {
  const Mat<double> J = constraint_jacobian(y);
  const int m = ambient_dim();
  const Mat<double> JJt = J * J.transpose();
  return Mat<double>::Identity(m, m) - J.transpose() * JJt.ldlt().solve(J);
}

Vec<double> ConstraintManifold::retract(const Vec<double>& y) const {
  Vec<double> z = rough_retract(y);
  for (int it = 0; it < 100; ++it) {
    Vec<double> next = rough_retract(z + projector(z) * (y - z));
    const double step = (next - z).lpNorm<Eigen::Infinity>();
    z = std::move(next);
    if (step < 1e-15) break;
  }
  return z;
}

double ConstraintManifold::defect(const Vec<double>& y) const {
  if (y.size() != ambient_dim() || !y.allFinite()) return INFINITY;
  return constraints(y).lpNorm<Eigen::Infinity>();
}

// ------------------------------------------------------------------- Sphere

Sphere::Sphere(double radius, int ambient) : r_(radius), m_(ambient) {
  require(radius > 0.0, "Sphere: radius must be positive");
  require(ambient >= 2, "Sphere: ambient dimension must be at least 2");
}

Vec<double> Sphere::constraints(const Vec<double>& y) const {
  Vec<double> c(1);
  c[0] = y.norm() - r_;
  return c;
}

Mat<double> Sphere::constraint_jacobian(const Vec<double>& y) const { return y.transpose() / y.norm(); }

Mat<double> Sphere::projector(const Vec<double>& y) const {
  return Mat<double>::Identity(m_, m_) - y * y.transpose() / y.squaredNorm();
}

Vec<double> Sphere::retract(const Vec<double>& y) const {
  const double n = y.norm();
  require(n > 0.0, "Sphere: cannot retract the centre");
  return y * (r_ / n);
}

std::optional<SmoothMap> Sphere::projection_map() const {
  const int m = m_;
  return SmoothMap::make(
      2 * m, m,
      [m](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        const V y = z.head(m);
        const V v = z.tail(m);
        return V(v - y * (y.dot(v) / y.dot(y)));
      },
      "sphere.Q");
}

std::optional<Vec<double>> Sphere::exponential(const Vec<double>& y, const Vec<double>& v) const {
  const double s = v.norm();
  if (s == 0.0) return y;
  return Vec<double>(std::cos(s / r_) * y + (r_ * std::sin(s / r_) / s) * v);
}

// ------------------------------------------------------------- PlaneInSpace

Mat<double> PlaneInSpace::projector(const Vec<double>&) const {
  Mat<double> q = Mat<double>::Identity(3, 3);
  q(2, 2) = 0.0;
  return q;
}

Vec<double> PlaneInSpace::retract(const Vec<double>& y) const {
  Vec<double> z = y;
  z[2] = 0.0;
  return z;
}

double PlaneInSpace::defect(const Vec<double>& y) const {
  if (y.size() != 3 || !y.allFinite()) return INFINITY;
  return std::abs(y[2]);
}

std::optional<SmoothMap> PlaneInSpace::projection_map() const {
  return SmoothMap::make(
      6, 3,
      [](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        V v = z.tail(3);
        v[2] = 0.0;
        return v;
      },
      "plane3.Q");
}

// --------------------------------------------------------------------- SO(3)

Vec<double> SpecialOrthogonal3::pack(const Eigen::Matrix3d& g) {
  return Eigen::Map<const Vec<double>>(g.data(), 9);
}

Eigen::Matrix3d SpecialOrthogonal3::unpack(const Vec<double>& y) {
  require(y.size() == 9, "so3: expected 9 coordinates");
  return Eigen::Map<const Eigen::Matrix3d>(y.data());
}

double SpecialOrthogonal3::orthogonality_defect(const Vec<double>& y) {
  const Eigen::Matrix3d g = unpack(y);
  return (g.transpose() * g - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Vec<double> SpecialOrthogonal3::constraints(const Vec<double>& y) const {
  const Eigen::Matrix3d g = unpack(y);
  const Eigen::Matrix3d c = g.transpose() * g - Eigen::Matrix3d::Identity();
  Vec<double> out(6);
  int k = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) out[k++] = c(i, j);
  return out;
}

Mat<double> SpecialOrthogonal3::constraint_jacobian(const Vec<double>& y) const {
  // d(gᵀg)_{ij} along δg = g_iᵀ δg_j + δg_iᵀ g_j in terms of columns.
  const Eigen::Matrix3d g = unpack(y);
  Mat<double> J = Mat<double>::Zero(6, 9);
  int k = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      J.block(k, 3 * j, 1, 3) += g.col(i).transpose();
      J.block(k, 3 * i, 1, 3) += g.col(j).transpose();
      ++k;
    }
  return J;
}

Mat<double> SpecialOrthogonal3::projector(const Vec<double>& y) const {
  const Eigen::Matrix3d g = unpack(y);
  Mat<double> Q(9, 9);
  for (int c = 0; c < 9; ++c) {
    Eigen::Matrix3d V = Eigen::Matrix3d::Zero();
    V(c % 3, c / 3) = 1.0;
    const Eigen::Matrix3d A = g.transpose() * V;
    const Eigen::Matrix3d P = g * (0.5 * (A - A.transpose()));
    Q.col(c) = pack(P);
  }
  return Q;
}

Vec<double> SpecialOrthogonal3::retract(const Vec<double>& y) const {
  const Eigen::Matrix3d g = unpack(y);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0) U.col(2) *= -1.0;
  return pack(U * V.transpose());
}

std::optional<SmoothMap> SpecialOrthogonal3::projection_map() const {
  return SmoothMap::make(
      18, 9,
      [](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        using S = typename V::Scalar;
        Eigen::Matrix<S, 3, 3> g, v;
        for (int c = 0; c < 3; ++c)
          for (int r = 0; r < 3; ++r) {
            g(r, c) = z[3 * c + r];
            v(r, c) = z[9 + 3 * c + r];
          }
        const Eigen::Matrix<S, 3, 3> a = g.transpose() * v;
        const Eigen::Matrix<S, 3, 3> p = g * ((a - a.transpose()) * 0.5);
        V out(9);
        for (int c = 0; c < 3; ++c)
          for (int r = 0; r < 3; ++r) out[3 * c + r] = p(r, c);
        return out;
      },
      "so3.Q");
}

namespace {
Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d h;
  h << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return h;
}
}  // namespace

std::optional<Vec<double>> SpecialOrthogonal3::exponential(const Vec<double>& y, const Vec<double>& v) const {
  const Eigen::Matrix3d g = unpack(y);
  const Eigen::Matrix3d a = g.transpose() * unpack(v);
  const Eigen::Vector3d w(a(2, 1), a(0, 2), a(1, 0));
  const double th = w.norm();
  const Eigen::Matrix3d K = hat(w);
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity() + K;
  if (th > 1e-12) {
    R = Eigen::Matrix3d::Identity() + (std::sin(th) / th) * K + ((1 - std::cos(th)) / (th * th)) * K * K;
  }
  return pack(g * R);
}

// ----------------------------------------------------------------- Product

ProductManifold::ProductManifold(std::vector<ManifoldPtr> factors) : factors_(std::move(factors)) {
  require(!factors_.empty(), "ProductManifold: needs at least one factor");
  for (const auto& f : factors_) {
    require(f != nullptr, "ProductManifold: null factor");
    offsets_.push_back(ambient_);
    ambient_ += f->ambient_dim();
  }
}

std::string ProductManifold::name() const {
  std::string s = "product(";
  for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "," : "") + factors_[i]->name();
  return s + ")";
}

int ProductManifold::intrinsic_dim() const {
  int d = 0;
  for (const auto& f : factors_) d += f->intrinsic_dim();
  return d;
}

Mat<double> ProductManifold::projector(const Vec<double>& y) const {
  Mat<double> Q = Mat<double>::Zero(ambient_, ambient_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int m = factors_[i]->ambient_dim();
    Q.block(offsets_[i], offsets_[i], m, m) = factors_[i]->projector(y.segment(offsets_[i], m));
  }
  return Q;
}

Vec<double> ProductManifold::retract(const Vec<double>& y) const {
  Vec<double> z(ambient_);
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int m = factors_[i]->ambient_dim();
    z.segment(offsets_[i], m) = factors_[i]->retract(y.segment(offsets_[i], m));
  }
  return z;
}

double ProductManifold::defect(const Vec<double>& y) const {
  if (y.size() != ambient_) return INFINITY;
  double d = 0.0;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const int m = factors_[i]->ambient_dim();
    d = std::max(d, factors_[i]->defect(y.segment(offsets_[i], m)));
  }
  return d;
}

std::optional<SmoothMap> ProductManifold::projection_map() const {
  std::vector<SmoothMap> maps;
  for (const auto& f : factors_) {
    auto q = f->projection_map();
    if (!q) return std::nullopt;
    maps.push_back(*q);
  }
  const int total = ambient_;
  auto offsets = offsets_;
  return SmoothMap::make(
      2 * total, total,
      [maps, offsets, total](const auto& z) {
        using V = std::decay_t<decltype(z)>;
        V out(total);
        for (std::size_t i = 0; i < maps.size(); ++i) {
          const int m = maps[i].out_dim();
          V in(2 * m);
          in << z.segment(offsets[i], m), z.segment(total + offsets[i], m);
          out.segment(offsets[i], m) = maps[i](in);
        }
        return out;
      },
      name() + ".Q");
}

ManifoldPtr make_plane(int dim) { return std::make_shared<Euclidean>(dim); }
ManifoldPtr make_sphere(double radius) { return std::make_shared<Sphere>(radius); }
ManifoldPtr make_so3() { return std::make_shared<SpecialOrthogonal3>(); }
ManifoldPtr make_product(std::vector<ManifoldPtr> factors) {
  return std::make_shared<ProductManifold>(std::move(factors));
}

}  // namespace roughman
