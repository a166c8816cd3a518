#pragma once

// Frame bundles: the orthonormal frame bundle of a surface in R³ and the
// full linear frame bundle of R^d. A bundle point is stored as one flat
// state vector so that RDE solvers can treat the bundle as a manifold.

#include <memory>
#include <string>

#include "roughman/fields.hpp"

namespace roughman {

struct FrameBundlePoint {
  Vec<double> x;      // base point, ambient coordinates
  Mat<double> frame;  // m×d, columns e(ε_i)
};

class FrameBundle {
 public:
  virtual ~FrameBundle() = default;

  virtual std::string name() const = 0;
  /// d, dimension of the model space E.
  virtual int model_dim() const = 0;
  virtual int state_dim() const = 0;
  virtual ManifoldPtr base_manifold() const = 0;
  /// The bundle as an embedded manifold in R^{state_dim}.
  virtual ManifoldPtr manifold() const = 0;

  virtual Vec<double> pack(const FrameBundlePoint& p) const = 0;
  virtual FrameBundlePoint unpack(const Vec<double>& state) const = 0;
  /// Largest violation of the frame-point invariants (tangency, orthonormality
  /// or invertibility, base on manifold).
  virtual double frame_defect(const Vec<double>& state) const = 0;

  /// (state, a) ↦ H^∇(e; a) ∈ R^{state_dim}.
  virtual const SmoothMap& horizontal_map() const = 0;
  /// (state, v) ↦ e⁻¹(v) ∈ R^d for v tangent at the base point.
  virtual const SmoothMap& inverse_frame_map() const = 0;

  int base_dim() const { return base_manifold()->ambient_dim(); }
  Vec<double> base(const Vec<double>& state) const { return state.head(base_dim()); }
  /// Frame from the Gram–Schmidt process applied to Q(x)ε_1, Q(x)ε_2, ...
  Vec<double> default_state(const Vec<double>& x) const;
  /// Throws ContractViolation when the state is not a valid frame point.
  void validate(const Vec<double>& state, double tol = 1e-10) const;

  /// H^∇(e; a), validated.
  Vec<double> horizontal_field(const Vec<double>& state, const Vec<double>& a) const;
  /// Canonical horizontal fields H_i(e) = H^∇(e; ε_i).
  VectorField canonical_horizontal(int i) const;
  VfOneForm canonical_horizontal_form() const;
  /// 𝐅_i(e) = H^∇(e; e⁻¹F_i(πe)), the horizontal lift of a one-form on the base.
  VfOneForm horizontal_lift(const VfOneForm& F) const;
};

using FrameBundlePtr = std::shared_ptr<const FrameBundle>;

/// Orthonormal frames of the plane z = 0 or a round sphere, state (x, e₁) ∈ R⁶
/// with e₂ = n(x) × e₁.
class SurfaceFrameBundle final : public FrameBundle {
 public:
  enum class Surface { Plane, Sphere };

  static std::shared_ptr<const SurfaceFrameBundle> plane();
  static std::shared_ptr<const SurfaceFrameBundle> sphere(double radius = 1.0);

  std::string name() const override;
  int model_dim() const override { return 2; }
  int state_dim() const override { return 6; }
  ManifoldPtr base_manifold() const override { return base_; }
  ManifoldPtr manifold() const override { return bundle_; }
  Vec<double> pack(const FrameBundlePoint& p) const override;
  FrameBundlePoint unpack(const Vec<double>& state) const override;
  double frame_defect(const Vec<double>& state) const override;
  const SmoothMap& horizontal_map() const override { return horizontal_; }
  const SmoothMap& inverse_frame_map() const override { return inverse_; }

  Surface surface() const { return surface_; }
  double radius() const { return radius_; }
  /// Vertical rotation generator V₁₂(x, e₁) = (0, e₂).
  VectorField vertical_field() const;
  /// Frame matrix [e₁ e₂ x/r] ∈ SO(3) (sphere only).
  Eigen::Matrix3d frame_matrix(const Vec<double>& state) const;
  /// Gauss curvature from the closed form, used by the solvers.
  double analytic_curvature() const;

 private:
  SurfaceFrameBundle(Surface s, double radius);
  Surface surface_;
  double radius_;
  ManifoldPtr base_;
  ManifoldPtr bundle_;
  SmoothMap horizontal_;
  SmoothMap inverse_;
};

/// Sign σ in [H₁,H₂] = σ·Ω·V₁₂, as measured on the unit sphere by the tests.
inline constexpr double kCurvatureBracketSign = 1.0;

/// Vertical coefficient c of [H₁,H₂](e) = c·V₁₂(e) + (base part), by central
/// differences with step h at the default frame over x. Also returns the
/// size of the non-vertical remainder through `remainder` when non-null.
double bracket_vertical_coefficient(const SurfaceFrameBundle& bundle, const Vec<double>& x, double h = 1e-4,
                                    double* remainder = nullptr);

/// Ω(x) = σ·c with c from the bracket above. Throws unless the bundle is
/// the orthonormal frame bundle of a surface.
double curvature_scalar(const FrameBundle& bundle, const Vec<double>& x, double h = 1e-4);

/// GL(R^d): state (x, E) with E column-major; frames are parallel.
class FlatFrameBundle final : public FrameBundle {
 public:
  explicit FlatFrameBundle(int d);
  std::string name() const override { return "gl_frames"; }
  int model_dim() const override { return d_; }
  int state_dim() const override { return d_ + d_ * d_; }
  ManifoldPtr base_manifold() const override { return base_; }
  ManifoldPtr manifold() const override { return bundle_; }
  Vec<double> pack(const FrameBundlePoint& p) const override;
  FrameBundlePoint unpack(const Vec<double>& state) const override;
  double frame_defect(const Vec<double>& state) const override;
  const SmoothMap& horizontal_map() const override { return horizontal_; }
  const SmoothMap& inverse_frame_map() const override { return inverse_; }

 private:
  int d_;
  ManifoldPtr base_;
  ManifoldPtr bundle_;
  SmoothMap horizontal_;
  SmoothMap inverse_;
};

}  // namespace roughman
