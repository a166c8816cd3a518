#pragma once

// Vector fields, vector-field-valued one-forms, brackets and the projection
// connection on an embedded manifold.

#include <string>
#include <vector>

#include "roughman/manifold.hpp"

namespace roughman {

class VectorField {
 public:
  VectorField() = default;
  /// map: R^m -> R^m; regularity is a label such as "C^3" or "C^inf".
  explicit VectorField(SmoothMap map, std::string regularity = "C^inf");

  template <class Fn>
  static VectorField make(int dim, Fn fn, std::string name = {}, std::string regularity = "C^inf") {
    return VectorField(SmoothMap::make(dim, dim, std::move(fn), std::move(name)), std::move(regularity));
  }

  template <class S>
  Vec<S> operator()(const Vec<S>& x) const {
    return map_(x);
  }

  int dim() const { return map_.in_dim(); }
  const SmoothMap& map() const { return map_; }
  const std::string& name() const { return map_.name(); }
  const std::string& regularity() const { return regularity_; }

 private:
  SmoothMap map_;
  std::string regularity_;
};

/// u ↦ F(·;u) = Σ uⁱ F_i.
class VfOneForm {
 public:
  VfOneForm() = default;
  explicit VfOneForm(std::vector<VectorField> fields);

  int dim_u() const { return static_cast<int>(fields_.size()); }
  int ambient_dim() const { return fields_.empty() ? 0 : fields_.front().dim(); }
  const VectorField& operator[](int i) const { return fields_.at(static_cast<std::size_t>(i)); }
  const std::vector<VectorField>& fields() const { return fields_; }

  /// Σ uⁱ F_i(x).
  Vec<double> apply(const Vec<double>& x, const Vec<double>& u) const;

 private:
  std::vector<VectorField> fields_;
};

// Stock fields.

/// Constant field ε_i on R^m.
VectorField coordinate_field(int m, int i);
/// x ↦ A x.
VectorField linear_field(const Mat<double>& A, std::string name = "linear");
/// x ↦ x_source · ε_target (for instance x∂_y on R²).
VectorField shear_field(int m, int source, int target);
/// x ↦ x_i² ε_i on R^m (finite-time explosion along ε_i).
VectorField quadratic_field(int m, int i);
/// x ↦ w × x on R³; tangent to every sphere about the origin.
VectorField rotation_field(const Eigen::Vector3d& w);
/// g ↦ g·ŵ on SO(3) ⊂ R⁹ (left-invariant).
VectorField left_invariant_field(const Eigen::Vector3d& w);
/// Skew matrix ŵ with ŵv = w × v.
Eigen::Matrix3d hat(const Eigen::Vector3d& w);

/// F_i(x) = Q(x)ε_i; requires a manifold with a projection map.
VfOneForm projected_coordinate_form(const EmbeddedManifold& M);

/// Max |Q(x)V(x) − V(x)|; used to verify tangency of user fields.
double tangency_defect(const EmbeddedManifold& M, const VectorField& V, const Vec<double>& x);

/// Central finite-difference bracket [V,W](x) = DW·V − DV·W with step h,
/// projected to T_xM when M is given.
Vec<double> lie_bracket(const VectorField& V, const VectorField& W, const Vec<double>& x, double h = 1e-4,
                        const EmbeddedManifold* M = nullptr);

/// The same bracket through exact forward-mode derivatives, as a field.
/// Evaluable one dual level shallower than its arguments.
VectorField lie_bracket_field(const VectorField& V, const VectorField& W);

/// Levi-Civita connection of the induced metric: ∇_X Y = Q(x)·DY(x)·X(x).
class ProjectionConnection {
 public:
  explicit ProjectionConnection(ManifoldPtr M) : M_(std::move(M)) {}
  Vec<double> covariant_derivative(const VectorField& X, const VectorField& Y, const Vec<double>& x) const;
  /// |X⟨Y,Z⟩ − ⟨∇_X Y, Z⟩ − ⟨Y, ∇_X Z⟩| with a central difference of step h
  /// along the exponential (or retracted) curve through x.
  double metric_compatibility_defect(const VectorField& X, const VectorField& Y, const VectorField& Z,
                                     const Vec<double>& x, double h = 1e-5) const;
  const EmbeddedManifold& manifold() const { return *M_; }

 private:
  ManifoldPtr M_;
};

/// A diffeomorphism g with inverse, both as smooth maps R^m -> R^m.
struct Diffeomorphism {
  SmoothMap forward;
  SmoothMap inverse;
  /// Dg(x)·v by forward-mode differentiation.
  Vec<double> differential(const Vec<double>& x, const Vec<double>& v) const;
};

/// x ↦ A x + b with A invertible.
Diffeomorphism affine_diffeomorphism(const Mat<double>& A, const Vec<double>& b);

/// Push-forward g_*V = Dg(g⁻¹(y))·V(g⁻¹(y)) as a field (exact derivatives).
VectorField pushforward_field(const Diffeomorphism& g, const VectorField& V);

}  // namespace roughman
