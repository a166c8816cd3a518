#pragma once

// Rough differential equations dx = F⊗(x; X(dt)) on embedded manifolds,
// solved by log-ODE steps, together with rough integrators built on them.

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roughman/roughpath.hpp"
#include "roughman/tensor_operator.hpp"

namespace roughman {

struct RDEPath {
  std::vector<double> times;
  std::vector<Vec<double>> points;
  int steps_per_unit = 0;
  int substeps = 0;
  double p = 0.0;
  int level = 0;
  std::string scheme = "log-ode-rk4";
  bool blow_up = false;
  /// Estimate of the explosion time when blow_up is set.
  double blow_up_time = 0.0;

  std::size_t size() const { return times.size(); }
  const Vec<double>& back() const { return points.back(); }
  /// Point at the sample whose time equals t (binary search, exact match).
  const Vec<double>& at_time(double t) const;
};

struct StepResult {
  Vec<double> x;
  bool blew_up = false;
  /// Fraction of the unit flow time completed before blow-up.
  double completed = 1.0;
};

struct SolveOptions {
  /// Uniform steps per unit time; ignored when `mesh` is non-empty.
  int steps_per_unit = 1024;
  int substeps = 4;
  /// Blow-up threshold on the state's max-abs norm.
  double blowup_bound = 1e6;
  /// Explicit mesh (absolute driver times), first entry 0.
  std::vector<double> mesh;
  /// Solve on [0, t_end]; defaults to the driver horizon.
  double t_end = -1.0;
};

/// Flows x0 for unit time along the field of `log_increment` (a Lie
/// element, zero scalar part) with `substeps` RK4 steps, retracting onto M
/// after each.
StepResult log_ode_step(const EmbeddedManifold& M, const VfOneForm& F, const Vec<double>& x0,
                        const TruncatedTensor& log_increment, int substeps = 4, double blowup_bound = 1e6);
StepResult log_ode_step(const EmbeddedManifold& M, const VfOneForm& F, const Vec<double>& x0,
                        const LieElement& log_increment, int substeps = 4, double blowup_bound = 1e6);

/// Mesh used by solve_rde for the given options and horizon.
std::vector<double> solve_mesh(const SolveOptions& opts, double horizon);

/// Iterates log_ode_step over the mesh with log X_{t_k, t_{k+1}}.
RDEPath solve_rde(const EmbeddedManifold& M, const RoughPathDriver& X, const VfOneForm& F, const Vec<double>& x0,
                  const SolveOptions& opts = {});

/// One piece of a (possibly composite) rough integrator. Local driver time
/// τ ∈ [0, T] corresponds to global time t_offset + τ.
struct IntegratorSegment {
  ManifoldPtr M;
  VfOneForm F;
  DriverPtr X;
  RDEPath path;  // local times
  double t_offset = 0.0;
};

/// Θ = (x, F, X), or a concatenation of such triples.
class RoughIntegrator {
 public:
  RoughIntegrator() = default;
  explicit RoughIntegrator(std::vector<IntegratorSegment> segments);

  static RoughIntegrator solve(ManifoldPtr M, VfOneForm F, DriverPtr X, const Vec<double>& x0,
                               const SolveOptions& opts = {});

  const std::vector<IntegratorSegment>& segments() const { return segments_; }
  bool composite() const { return segments_.size() > 1; }
  const EmbeddedManifold& manifold() const { return *segments_.front().M; }
  ManifoldPtr manifold_ptr() const { return segments_.front().M; }

  /// Joined path in global time (junction points appear once).
  RDEPath path() const;
  Vec<double> start() const { return segments_.front().path.points.front(); }
  Vec<double> end() const { return segments_.back().path.back(); }
  double t_end() const;
  /// Lifetime ζ: blow-up time if flagged, otherwise +∞ (the solve stops at t_end()).
  double lifetime() const;
  bool blew_up() const;

 private:
  std::vector<IntegratorSegment> segments_;
};

/// Θ_k ⋯ Θ_1 as one composite integrator. Each start must match the previous
/// end within 1e-8.
RoughIntegrator concatenate(const std::vector<RoughIntegrator>& parts);

/// H(x,y)p = (p, G(y,x;p)) on M×N, with G given as a map of the concatenated
/// input (y, x, p) ∈ R^{n+m+m} to R^n.
struct BundleConnectionForm {
  SmoothMap G;
  int fibre_dim = 0;  // n
  int base_dim = 0;   // m

  template <class Fn>
  static BundleConnectionForm make(int n, int m, Fn fn, std::string name = "G") {
    return {SmoothMap::make(n + 2 * m, n, std::move(fn), std::move(name)), n, m};
  }
};

/// G(y,x;p) = 0.
BundleConnectionForm zero_connection(int n, int m);
/// G(y,x;p) = α_x(p) with α = df, so y accumulates f along the path (N = R).
BundleConnectionForm exact_one_form(const SmoothMap& f);
/// G(y,x;p) = ⟨c, p⟩ (N = R).
BundleConnectionForm constant_one_form(const Vec<double>& c);
/// Max of |G(y,x;p) projected off T_yN| and of the linearity defect in p
/// over `samples` seeded random (y, x, p, q) with y on N, x on M.
double connection_form_defect(const BundleConnectionForm& G, const EmbeddedManifold& M, const EmbeddedManifold& N,
                              const std::vector<Vec<double>>& xs, const std::vector<Vec<double>>& ys,
                              std::uint64_t seed = 0);

/// The one-form (F_i(x), G(y,x;F_i(x))) on M×N.
VfOneForm lift_one_form(const VfOneForm& F, const BundleConnectionForm& G);

/// Solves the lifted system from (x0, y0) on the meshes of Θ. The result is an
/// integrator on M×N with fields H∘F; blow-up of y truncates its lifetime.
RoughIntegrator lift_through_connection(const RoughIntegrator& theta, const BundleConnectionForm& G,
                                        ManifoldPtr N, const Vec<double>& y0, int substeps = 4);

/// ∫ α along Θ for α = G(·) on N = R, i.e. y_T − y_0 of the lift from 0.
double integrate_one_form(const RoughIntegrator& theta, const BundleConnectionForm& alpha);

/// ((g(x_t)), g_*F, X) on M′ (M′ defaults to M).
RoughIntegrator pushforward(const RoughIntegrator& theta, const Diffeomorphism& g, ManifoldPtr M_image = nullptr);

/// Solves each segment again from the integrator's start on the same meshes.
RoughIntegrator resolve(const RoughIntegrator& theta, const Vec<double>& x0, int substeps = 4);

/// Sup distance between two sampled paths on identical time stamps.
double sup_distance(const RDEPath& a, const RDEPath& b);

struct DavieReport {
  std::vector<double> window_lengths;
  std::vector<double> residuals;  // max over windows of each length
  double exponent = 0.0;          // fitted log-log slope a
  double max_residual = 0.0;
  /// All residuals below the round-off floor; the expansion is exact.
  bool exact = false;
  bool pass() const { return exact || exponent > 1.0; }
};

/// Ambient coordinates and pairwise products x_i x_j (i ≤ j) on R^m.
SmoothMap coordinate_and_quadratic_tests(int m);

/// |f(x_t) − (F⊗(X_{s,t}) f)(x_s)| over windows of 2^j mesh steps
/// (j = 0..max_log2_window), fitted against |t − s|.
DavieReport davie_residual(const RDEPath& path, const VfOneForm& F, const RoughPathDriver& X,
                           const SmoothMap& tests, int max_log2_window = 6, double roundoff_floor = 1e-12);
DavieReport davie_residual(const RoughIntegrator& theta, const SmoothMap* tests = nullptr, int max_log2_window = 6);

nlohmann::json path_metadata(const RDEPath& path);

}  // namespace roughman
