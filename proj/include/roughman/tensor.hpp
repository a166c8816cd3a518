#pragma once

// Truncated tensor algebra T^N(R^d) with dense row-major storage per degree.

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <vector>

#include "roughman/errors.hpp"

namespace roughman {

class TruncatedTensor {
 public:
  TruncatedTensor() = default;
  /// Zero tensor (scalar level 0).
  TruncatedTensor(int dim, int level);

  static TruncatedTensor zero(int dim, int level) { return {dim, level}; }
  static TruncatedTensor unit(int dim, int level);
  /// Degree-1 element Σ v^i ε_i.
  static TruncatedTensor from_vector(std::span<const double> v, int level);
  /// Single letter ε_i.
  static TruncatedTensor letter(int dim, int level, int i);

  int dim() const { return dim_; }
  int level() const { return level_; }
  /// d^k
  std::size_t degree_size(int k) const;

  std::span<double> degree(int k);
  std::span<const double> degree(int k) const;
  double scalar() const { return data_[0]; }
  double& scalar() { return data_[0]; }

  /// Coefficient of the word (i1,...,ik).
  double& at(std::span<const int> word);
  double at(std::span<const int> word) const;

  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  TruncatedTensor& operator+=(const TruncatedTensor& o);
  TruncatedTensor& operator-=(const TruncatedTensor& o);
  TruncatedTensor& operator*=(double s);

  /// Same dim and level.
  bool same_shape(const TruncatedTensor& o) const { return dim_ == o.dim_ && level_ == o.level_; }

  /// Copy with a different truncation level (extra degrees are zero).
  TruncatedTensor with_level(int level) const;

 private:
  int dim_ = 0;
  int level_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

TruncatedTensor operator+(TruncatedTensor a, const TruncatedTensor& b);
TruncatedTensor operator-(TruncatedTensor a, const TruncatedTensor& b);
TruncatedTensor operator*(double s, TruncatedTensor a);

/// Truncated product: degree k of the result is Σ_{i+j=k} a_i ⊗ b_j.
TruncatedTensor tensor_mul(const TruncatedTensor& a, const TruncatedTensor& b);

/// Σ_k l^⊗k / k!; requires a zero scalar level.
TruncatedTensor tensor_exp(const TruncatedTensor& l);

/// Σ_k (−1)^{k+1} (g − 1)^⊗k / k; requires scalar level 1.
TruncatedTensor tensor_log(const TruncatedTensor& g);

/// Inverse in the group of tensors with unit scalar part. Solved degree by
/// degree, h_k = −Σ_{j≥1} g_j ⊗ h_{k−j}.
TruncatedTensor group_inverse(const TruncatedTensor& g);

/// exp of a degree-1 element, v^⊗k/k! per degree.
TruncatedTensor exp_vector(std::span<const double> v, int level);

/// Lie bracket a⊗b − b⊗a.
TruncatedTensor bracket(const TruncatedTensor& a, const TruncatedTensor& b);

/// Left-to-right bracketing map on one homogeneous degree:
/// ε_{i1}⋯ε_{ik} ↦ [...[ε_{i1}, ε_{i2}], ..., ε_{ik}].
std::vector<double> dynkin_map(std::span<const double> component, int dim, int k);

/// Projection onto the free Lie algebra, P_k ↦ r(P_k)/k per degree.
TruncatedTensor lie_projection(const TruncatedTensor& t);

/// ℓ¹ norm of one degree.
double degree_norm(const TruncatedTensor& t, int k);
/// max_k |g_k|^{1/k} over k ≥ 1.
double homogeneous_norm(const TruncatedTensor& g);
/// max-abs over all coefficients of a − b.
double max_abs_diff(const TruncatedTensor& a, const TruncatedTensor& b);

/// An element of the free nilpotent Lie algebra, validated at construction.
class LieElement {
 public:
  /// Throws ContractViolation unless t has zero scalar part and every
  /// degree satisfies the Dynkin criterion within tol (relative).
  explicit LieElement(TruncatedTensor t, double tol = 1e-12);

  static LieElement letter(int dim, int level, int i);
  static LieElement from_vector(std::span<const double> v, int level);

  const TruncatedTensor& tensor() const { return t_; }
  int dim() const { return t_.dim(); }
  int level() const { return t_.level(); }
  /// Highest degree carrying a nonzero coefficient.
  int top_degree() const;

  LieElement scaled(double s) const;
  friend LieElement operator+(const LieElement& a, const LieElement& b);
  friend LieElement operator-(const LieElement& a, const LieElement& b);
  friend LieElement lie_bracket(const LieElement& a, const LieElement& b);

 private:
  struct Trusted {};
  LieElement(TruncatedTensor t, Trusted) : t_(std::move(t)) {}
  TruncatedTensor t_;
};

struct LieReport {
  /// Index k holds the defect of degree k; entry 0 is unused.
  std::vector<double> abs_violation;
  std::vector<double> rel_violation;
  std::vector<bool> degree_pass;
  bool pass = true;
  double max_abs() const;
};

/// Applies tensor_log then the per-degree Dynkin test. Degree k passes when
/// |r(P_k)/k − P_k|_∞ ≤ tol · max(1, |P_k|_∞).
LieReport check_lie(const TruncatedTensor& g, double tol = 1e-12);

/// Chen product of exp(increment) over consecutive points.
TruncatedTensor signature_piecewise_linear(const std::vector<std::vector<double>>& points, int level);

nlohmann::json to_json(const TruncatedTensor& t);
TruncatedTensor tensor_from_json(const nlohmann::json& j);

}  // namespace roughman
