#pragma once

// Weak geometric Hölder p-rough path drivers over R^d.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "roughman/tensor.hpp"

namespace roughman {

class RoughPathDriver {
 public:
  virtual ~RoughPathDriver() = default;

  virtual std::string kind() const = 0;
  virtual int dim() const = 0;
  virtual double p() const = 0;
  /// Increments are defined for 0 ≤ s ≤ t ≤ horizon().
  virtual double horizon() const = 0;
  /// X_{s,t}, truncated at level ⌊p⌋ (or the level of the driver's data).
  virtual TruncatedTensor eval(double s, double t) const = 0;

  int level() const;

 protected:
  void check_times(double s, double t) const;
};

using DriverPtr = std::shared_ptr<const RoughPathDriver>;

/// Piecewise log-linear driver: on [t_i, t_{i+1}] the increment over a
/// sub-interval of fraction θ is exp(θ·L_i). Chen holds by construction.
/// Covers canonical lifts of polygons (L_i = increment) and group-valued
/// data sampled on a mesh.
class PiecewiseLogLinearDriver final : public RoughPathDriver {
 public:
  PiecewiseLogLinearDriver(std::vector<double> times, std::vector<TruncatedTensor> logs, double p,
                           std::string kind = "piecewise");

  std::string kind() const override { return kind_; }
  int dim() const override { return dim_; }
  double p() const override { return p_; }
  double horizon() const override { return times_.back(); }
  TruncatedTensor eval(double s, double t) const override;

  const std::vector<double>& times() const { return times_; }
  std::size_t segments() const { return logs_.size(); }

 private:
  std::size_t segment_of(double t) const;
  TruncatedTensor partial(std::size_t i, double a, double b) const;
  /// Ordered product E_i ⊗ ... ⊗ E_{j-1} through a segment tree.
  TruncatedTensor range_product(std::size_t i, std::size_t j) const;

  std::vector<double> times_;
  std::vector<TruncatedTensor> logs_;
  std::vector<TruncatedTensor> tree_;  // tree_[n + i] = exp(L_i)
  std::size_t leaves_ = 0;
  int dim_ = 0;
  int level_ = 0;
  double p_ = 0.0;
  std::string kind_;
};

/// Canonical lift of the polygon through (times[i], values[i]).
/// Requires at least two samples, strictly increasing times and p ≥ 2.
DriverPtr lift_smooth_path(const std::vector<double>& times, const std::vector<std::vector<double>>& values,
                           double p);

/// Samples of a parametrized curve on a uniform grid of `samples` points
/// over [0, horizon], lifted as above.
DriverPtr lift_function(const std::function<std::vector<double>(double)>& f, double horizon, int samples,
                        double p);

/// h^n_t = (cos(n²t), sin(n²t))/n on [0, horizon].
std::vector<double> spinning_signal(int n, double t);
DriverPtr lift_spinning_signal(int n, int samples, double p = 2.5, double horizon = 1.0);

/// Level-1 part 0 and level-2 part (t−s)A, A antisymmetric.
class PureAreaDriver final : public RoughPathDriver {
 public:
  PureAreaDriver(std::vector<std::vector<double>> A, double p = 2.5, double horizon = 1.0);
  std::string kind() const override { return "pure_area"; }
  int dim() const override { return static_cast<int>(A_.size()); }
  double p() const override { return p_; }
  double horizon() const override { return T_; }
  TruncatedTensor eval(double s, double t) const override;

 private:
  std::vector<std::vector<double>> A_;
  double p_;
  double T_;
};

/// Level-1 part (t−s)e and level-2 part ½(t−s)² e⊗e + (t−s)A.
class SpinningLineDriver final : public RoughPathDriver {
 public:
  SpinningLineDriver(std::vector<double> e, std::vector<std::vector<double>> A, double p = 2.5,
                     double horizon = 1.0);
  std::string kind() const override { return "spinning_line"; }
  int dim() const override { return static_cast<int>(e_.size()); }
  double p() const override { return p_; }
  double horizon() const override { return T_; }
  TruncatedTensor eval(double s, double t) const override;

 private:
  std::vector<double> e_;
  std::vector<std::vector<double>> A_;
  double p_;
  double T_;
};

/// X_{s,t} = exp((t−s)Λ) truncated at ⌊p⌋.
class LogLinearDriver final : public RoughPathDriver {
 public:
  LogLinearDriver(const LieElement& lambda, double p, double horizon = 1.0);
  std::string kind() const override { return "log_linear"; }
  int dim() const override { return lambda_.dim(); }
  double p() const override { return p_; }
  double horizon() const override { return T_; }
  TruncatedTensor eval(double s, double t) const override;
  const TruncatedTensor& lambda() const { return lambda_; }

 private:
  TruncatedTensor lambda_;
  double p_;
  double T_;
};

DriverPtr pure_area(const std::vector<std::vector<double>>& A, double p = 2.5, double horizon = 1.0);
DriverPtr spinning_line(const std::vector<double>& e, const std::vector<std::vector<double>>& A, double p = 2.5,
                        double horizon = 1.0);
DriverPtr log_linear(const LieElement& lambda, double p, double horizon = 1.0);

struct DriverReport {
  double chen_defect = 0.0;      // max-abs over sampled triples
  double identity_defect = 0.0;  // max |X_{s,s} − 1|
  double lie_defect = 0.0;       // max absolute Dynkin defect
  /// Index k: sup |X^k_{s,t}|/|t−s|^{k/p} over dyadic windows (entry 0 unused).
  std::vector<double> holder_constant;
  /// Index k: log-log slope of the per-scale max of |X^k| against the window
  /// length, divided by k; ≈ 1 for smooth paths on scales where they are
  /// smooth, ≈ 1/p for rough ones.
  std::vector<double> holder_exponent;
  int triples = 0;
  bool pass = false;
};

struct ValidateOptions {
  int triples = 1000;
  std::uint64_t seed = 12345;
  /// Tolerance for the Chen, identity and Lie defects.
  double tol = 1e-10;
};

/// Checks the driver axioms on a time grid (sorted, inside [0, horizon]).
DriverReport validate_driver(const RoughPathDriver& X, const std::vector<double>& grid,
                             const ValidateOptions& opts = {});

/// Uniform grid of n+1 points over [a, b].
std::vector<double> uniform_grid(double a, double b, int n);

}  // namespace roughman
