#pragma once

// Action of a tensor through a vector-field-valued one-form: a word
// ε_{w1}⋯ε_{wk} acts as the differential operator V_{w1}∘⋯∘V_{wk} (first
// letter outermost), extended linearly. For a Lie element and φ = id this
// is the log-ODE vector field; for a signature it is the Taylor–Euler
// expansion of φ along the solution.

#include <optional>
#include <vector>

#include "roughman/fields.hpp"
#include "roughman/tensor.hpp"

namespace roughman {

class TensorOperator {
 public:
  TensorOperator(const VfOneForm& F, TruncatedTensor coeffs);

  /// (F⊗(coeffs) φ)(y). φ = nullptr stands for the identity map.
  template <class S>
  Vec<S> apply(const SmoothMap* phi, const Vec<S>& y) const {
    require(y.size() == F_->ambient_dim(), "TensorOperator: point has the wrong dimension");
    if (phi) require(phi->in_dim() == F_->ambient_dim(), "TensorOperator: test function has the wrong input");
    return node(0, 0, phi, y);
  }

  /// Vector field y ↦ Σ_w c_w (V_{w1}⋯V_{wk} id)(y); needs a zero scalar part.
  Vec<double> field(const Vec<double>& y) const { return apply<double>(nullptr, y); }

  /// Same field as a VectorField object (keeps a copy of the data).
  VectorField as_field() const;

  /// Largest degree with a nonzero coefficient.
  int top_degree() const { return top_; }
  const TruncatedTensor& coefficients() const { return c_; }

 private:
  // T_u(y) = c_u φ(y) + Σ_a D T_{ua}(y)·V_a(y) for the prefix u of length j
  // with row-major index idx.
  template <class S>
  Vec<S> node(int j, std::size_t idx, const SmoothMap* phi, const Vec<S>& y) const {
    const int out_dim = phi ? phi->out_dim() : static_cast<int>(y.size());
    Vec<S> out = Vec<S>::Zero(out_dim);
    const double c = c_.degree(j)[idx];
    if (c != 0.0) out += (phi ? (*phi)(y) : y) * c;
    if (j >= top_) return out;
    const int d = c_.dim();
    for (int a = 0; a < d; ++a) {
      const std::size_t child = idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(a);
      if (!live_[static_cast<std::size_t>(j) + 1][child]) continue;
      if constexpr (dual_depth_v<S> < kMaxDualDepth) {
        const Vec<S> va = (*F_)[a](y);
        out += eps_part(node(j + 1, child, phi, seed(y, va)));
      } else {
        throw ContractViolation("TensorOperator: degree exceeds supported derivative depth");
      }
    }
    return out;
  }

  std::shared_ptr<const VfOneForm> F_;
  TruncatedTensor c_;
  int top_ = 0;
  // live_[j][idx]: some coefficient c_{uv} with |u| = j, idx(u) = idx is nonzero.
  std::vector<std::vector<char>> live_;
};

/// The log-ODE field built from nested brackets instead: by the Dynkin
/// identity a Lie element Σ_w Λ_w w equals Σ_k Σ_{|w|=k} (Λ_w/k)
/// [[ε_{w1},ε_{w2}],…,ε_{wk}], and letters map to fields. Used as an
/// independent cross-check of TensorOperator.
VectorField bracket_substituted_field(const VfOneForm& F, const TruncatedTensor& lie);

}  // namespace roughman
