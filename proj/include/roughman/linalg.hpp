#pragma once

// Small dense solves that work on any scalar type, including nested duals.

#include <cmath>

#include "roughman/dual.hpp"
#include "roughman/errors.hpp"

namespace roughman {

/// Solves A x = b by Gaussian elimination with partial pivoting on the
/// value part of each entry.
template <class S>
Vec<S> solve_dense(Mat<S> A, Vec<S> b) {
  const Eigen::Index n = A.rows();
  require(A.cols() == n && b.size() == n, "solve_dense: shape mismatch");
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(value_of(A(i, k))) > std::abs(value_of(A(p, k)))) p = i;
    require(std::abs(value_of(A(p, k))) > 1e-300, "solve_dense: singular matrix");
    if (p != k) {
      A.row(k).swap(A.row(p));
      std::swap(b[k], b[p]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const S f = A(i, k) / A(k, k);
      for (Eigen::Index j = k; j < n; ++j) A(i, j) -= f * A(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec<S> x(n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    S s = b[k];
    for (Eigen::Index j = k + 1; j < n; ++j) s -= A(k, j) * x[j];
    x[k] = s / A(k, k);
  }
  return x;
}

}  // namespace roughman
