#pragma once

// Finite-dimensional manifolds presented through an ambient embedding: a
// tangent projector Q(y) and a nearest-point retraction.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "roughman/smooth_map.hpp"

namespace roughman {

class EmbeddedManifold {
 public:
  virtual ~EmbeddedManifold() = default;

  virtual std::string name() const = 0;
  virtual int ambient_dim() const = 0;
  virtual int intrinsic_dim() const = 0;

  /// Orthogonal projector onto T_yM (m×m).
  virtual Mat<double> projector(const Vec<double>& y) const = 0;
  /// Nearest point on the manifold for y in a tubular neighbourhood.
  virtual Vec<double> retract(const Vec<double>& y) const = 0;
  /// Max-abs residual of the defining constraints (0 on the manifold).
  virtual double defect(const Vec<double>& y) const = 0;

  /// (y, v) ↦ Q(y)v as an evaluable map, input layout [y, v].
  virtual std::optional<SmoothMap> projection_map() const { return std::nullopt; }
  /// Exact exponential map of the embedded metric, where one is known.
  virtual std::optional<Vec<double>> exponential(const Vec<double>& y, const Vec<double>& v) const {
    (void)y;
    (void)v;
    return std::nullopt;
  }

  /// Q(y)v; throws if y is farther than 1e-8 from the manifold.
  Vec<double> tangent_project(const Vec<double>& y, const Vec<double>& v) const;
  bool contains(const Vec<double>& y, double tol = 1e-8) const { return defect(y) <= tol; }
};

using ManifoldPtr = std::shared_ptr<const EmbeddedManifold>;

class Euclidean final : public EmbeddedManifold {
 public:
  explicit Euclidean(int dim, std::string name = {});
  std::string name() const override { return name_; }
  int ambient_dim() const override { return dim_; }
  int intrinsic_dim() const override { return dim_; }
  Mat<double> projector(const Vec<double>& y) const override;
  Vec<double> retract(const Vec<double>& y) const override { return y; }
  double defect(const Vec<double>& y) const override;
  std::optional<SmoothMap> projection_map() const override;
  std::optional<Vec<double>> exponential(const Vec<double>& y, const Vec<double>& v) const override {
    return Vec<double>(y + v);
  }

 private:
  int dim_;
  std::string name_;
};

/// Common machinery for manifolds cut out by c(y) = 0 with full-rank
/// Jacobian: Q = I − Jᵀ(JJᵀ)⁻¹J and a normal retraction obtained by
/// iterating z ← r(z + Q(z)(y − z)) from a cheap retraction r.
class ConstraintManifold : public EmbeddedManifold {
 public:
  Mat<double> projector(const Vec<double>& y) const override;
  Vec<double> retract(const Vec<double>& y) const override;
  double defect(const Vec<double>& y) const override;

 protected:
  virtual Vec<double> constraints(const Vec<double>& y) const = 0;
  virtual Mat<double> constraint_jacobian(const Vec<double>& y) const = 0;
  /// Any retraction; retract() refines it to the nearest point.
  virtual Vec<double> rough_retract(const Vec<double>& y) const = 0;
};

/// Round sphere of the given radius centred at the origin of R^m.
class Sphere final : public ConstraintManifold {
 public:
  explicit Sphere(double radius = 1.0, int ambient = 3);
  std::string name() const override { return "sphere"; }
  int ambient_dim() const override { return m_; }
  int intrinsic_dim() const override { return m_ - 1; }
  Mat<double> projector(const Vec<double>& y) const override;
  Vec<double> retract(const Vec<double>& y) const override;
  std::optional<SmoothMap> projection_map() const override;
  std::optional<Vec<double>> exponential(const Vec<double>& y, const Vec<double>& v) const override;
  double radius() const { return r_; }

 protected:
  Vec<double> constraints(const Vec<double>& y) const override;
  Mat<double> constraint_jacobian(const Vec<double>& y) const override;
  Vec<double> rough_retract(const Vec<double>& y) const override { return retract(y); }

 private:
  double r_;
  int m_;
};

/// The plane z = 0 inside R³ (base of the surface frame bundle of the plane).
class PlaneInSpace final : public EmbeddedManifold {
 public:
  std::string name() const override { return "plane3"; }
  int ambient_dim() const override { return 3; }
  int intrinsic_dim() const override { return 2; }
  Mat<double> projector(const Vec<double>& y) const override;
  Vec<double> retract(const Vec<double>& y) const override;
  double defect(const Vec<double>& y) const override;
  std::optional<SmoothMap> projection_map() const override;
};

/// SO(3) ⊂ R⁹, matrices stored column-major.
class SpecialOrthogonal3 final : public ConstraintManifold {
 public:
  std::string name() const override { return "so3"; }
  int ambient_dim() const override { return 9; }
  int intrinsic_dim() const override { return 3; }
  Mat<double> projector(const Vec<double>& y) const override;
  /// Polar factor, the Frobenius-nearest rotation.
  Vec<double> retract(const Vec<double>& y) const override;
  std::optional<SmoothMap> projection_map() const override;
  /// g·expm(gᵀv) for tangent v.
  std::optional<Vec<double>> exponential(const Vec<double>& y, const Vec<double>& v) const override;

  static Vec<double> pack(const Eigen::Matrix3d& g);
  static Eigen::Matrix3d unpack(const Vec<double>& y);
  /// ‖gᵀg − I‖ (max-abs entry).
  static double orthogonality_defect(const Vec<double>& y);

 protected:
  Vec<double> constraints(const Vec<double>& y) const override;
  Mat<double> constraint_jacobian(const Vec<double>& y) const override;
  Vec<double> rough_retract(const Vec<double>& y) const override { return retract(y); }
};

/// M₁ × ... × M_k with concatenated ambient coordinates.
class ProductManifold final : public EmbeddedManifold {
 public:
  explicit ProductManifold(std::vector<ManifoldPtr> factors);
  std::string name() const override;
  int ambient_dim() const override { return ambient_; }
  int intrinsic_dim() const override;
  Mat<double> projector(const Vec<double>& y) const override;
  Vec<double> retract(const Vec<double>& y) const override;
  double defect(const Vec<double>& y) const override;
  std::optional<SmoothMap> projection_map() const override;

  const std::vector<ManifoldPtr>& factors() const { return factors_; }
  int offset(std::size_t i) const { return offsets_[i]; }

 private:
  std::vector<ManifoldPtr> factors_;
  std::vector<int> offsets_;
  int ambient_ = 0;
};

ManifoldPtr make_plane(int dim = 2);
ManifoldPtr make_sphere(double radius = 1.0);
ManifoldPtr make_so3();
ManifoldPtr make_product(std::vector<ManifoldPtr> factors);

}  // namespace roughman
