#pragma once

// Parallel transport along rough integrators, Cartan development and
// anti-development, and the canonical representation of an integrator by a
// driver over the model space.

#include <nlohmann/json.hpp>

#include "roughman/frame_bundle.hpp"
#include "roughman/rde.hpp"

namespace roughman {

/// Solves de = 𝐅(e; X(dt)) on the frame bundle, 𝐅 the horizontal lift of
/// each segment's F. Throws unless π(e0) equals the start of Θ within 1e-8.
RoughIntegrator parallel_transport(const RoughIntegrator& theta, const FrameBundle& bundle,
                                   const Vec<double>& e0, int substeps = 4);

/// Signed rotation angle of the frame after transport around a closed loop,
/// measured in the oriented tangent plane (surface bundles only).
double holonomy_angle(const SurfaceFrameBundle& bundle, const Vec<double>& e_start, const Vec<double>& e_end);

/// Latitude circle at polar angle θ on the sphere of radius r, traversed once
/// counter-clockwise about the z-axis, sampled at n+1 points over [0, 1].
std::vector<std::vector<double>> latitude_loop(double theta, int n, double radius = 1.0);

struct Development {
  std::vector<double> times;
  std::vector<Vec<double>> u;       // model-space path
  std::vector<Vec<double>> frames;  // bundle states e_t
};

/// u̇ = e_t⁻¹(γ̇_t) along the parallel frame e_t, u_0 = 0. γ is given by
/// ambient samples at strictly increasing times, starting at π(e0).
Development antidevelop(const FrameBundle& bundle, const std::vector<double>& times,
                        const std::vector<std::vector<double>>& gamma, const Vec<double>& e0, int substeps = 4);

/// γ̇ = e_t(u̇_t) with e_t parallel: the horizontal flow driven by u.
/// The returned Development carries u and the frames; the base path is
/// the head of each frame state.
Development develop(const FrameBundle& bundle, const std::vector<double>& times,
                    const std::vector<std::vector<double>>& u, const Vec<double>& e0, int substeps = 4);

struct CanonicalRepresentation {
  /// Frame path with one segment per segment of Θ.
  RoughIntegrator frames;
  /// Driver over E = R^d made from the mesh increments Z_s⁻¹ ⊗ Z_t.
  std::shared_ptr<const PiecewiseLogLinearDriver> Z;
  /// Z_t along the global mesh.
  std::vector<TruncatedTensor> Z_path;
  Vec<double> e0;
  std::string bundle_name;
};

/// Solves de = 𝐅(e; X(dt)), dZ = Z ⊗ e⁻¹F(πe; X(dt)) from (e0, 1).
CanonicalRepresentation canonical_representation(const RoughIntegrator& theta, const FrameBundle& bundle,
                                                 const Vec<double>& e0, int substeps = 4);

struct RepresentationReport {
  double distance = 0.0;      // sup over the mesh of |(e,y) − (ē,ȳ)|
  double tol = 0.0;
  double frame_defect = 0.0;  // worst frame invariant violation on either side
  DriverReport z_report;      // validate_driver on Z
  bool pass = false;
};

/// Solves 𝔖 (driven by X) and 𝔖̄ (driven by Z) from (e0, y0) and compares.
RepresentationReport verify_representation(const RoughIntegrator& theta, const FrameBundle& bundle,
                                           const BundleConnectionForm& G, ManifoldPtr N, const Vec<double>& e0,
                                           const Vec<double>& y0, double tol, int substeps = 4);

/// Same, reusing an already computed representation.
RepresentationReport verify_representation(const RoughIntegrator& theta, const CanonicalRepresentation& rep,
                                           const FrameBundle& bundle, const BundleConnectionForm& G,
                                           ManifoldPtr N, const Vec<double>& y0, double tol, int substeps = 4);

nlohmann::json to_json(const CanonicalRepresentation& rep);

}  // namespace roughman
