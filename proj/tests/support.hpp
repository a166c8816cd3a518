#pragma once

// Generators and independent oracles shared by the unit tests. The oracles
// avoid the library's tensor product and solvers.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "roughman/tensor.hpp"

namespace testing {

using roughman::TruncatedTensor;

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240601);
  return g;
}

inline double uniform(double a = -1.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng()); }

inline std::vector<double> random_vector(int d, double scale = 1.0) {
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = scale * uniform();
  return v;
}

inline TruncatedTensor random_tensor(int d, int n, double scalar, double scale = 1.0) {
  TruncatedTensor t(d, n);
  t.scalar() = scalar;
  for (int k = 1; k <= n; ++k)
    for (auto& c : t.degree(k)) c = scale * uniform();
  return t;
}

/// Random Lie element: letters plus random nested brackets of letters.
inline roughman::LieElement random_lie(int d, int n, double scale = 1.0) {
  using roughman::LieElement;
  LieElement out = LieElement::from_vector(random_vector(d, scale), n);
  for (int k = 2; k <= n; ++k)
    for (int rep = 0; rep < 3; ++rep) {
      LieElement b = LieElement::letter(d, n, uniform_int(0, d - 1));
      for (int j = 1; j < k; ++j) b = lie_bracket(b, LieElement::letter(d, n, uniform_int(0, d - 1)));
      out = out + b.scaled(scale * uniform());
    }
  return out;
}

/// Random polygon in R^d with `points` vertices.
inline std::vector<std::vector<double>> random_polygon(int d, int points, double step = 0.3) {
  std::vector<std::vector<double>> out{random_vector(d)};
  for (int i = 1; i < points; ++i) {
    auto x = out.back();
    for (auto& c : x) c += step * uniform();
    out.push_back(x);
  }
  return out;
}

/// Product by the naive word-by-word double loop over flat coefficients.
inline TruncatedTensor naive_mul(const TruncatedTensor& a, const TruncatedTensor& b) {
  const int d = a.dim(), n = a.level();
  TruncatedTensor out(d, n);
  auto coef = [](const TruncatedTensor& t, int k, std::size_t idx) { return k == 0 ? t.scalar() : t.degree(k)[idx]; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const std::size_t na = i == 0 ? 1 : a.degree_size(i), nb = j == 0 ? 1 : b.degree_size(j);
      for (std::size_t x = 0; x < na; ++x)
        for (std::size_t y = 0; y < nb; ++y) {
          double v = coef(a, i, x) * coef(b, j, y);
          if (i + j == 0)
            out.scalar() += v;
          else
            out.degree(i + j)[x * nb + y] += v;
        }
    }
  return out;
}

/// (1 + x)⁻¹ = Σ (−x)^k, truncated; x has zero scalar part.
inline TruncatedTensor neumann_inverse(const TruncatedTensor& g) {
  TruncatedTensor x = g;
  x.scalar() = 0.0;
  TruncatedTensor term = TruncatedTensor::unit(g.dim(), g.level());
  TruncatedTensor sum = term;
  for (int k = 1; k <= g.level(); ++k) {
    term = naive_mul(term, x);
    term *= -1.0;
    sum += term;
  }
  return sum;
}

/// Term-by-term exponential series with the naive product.
inline TruncatedTensor series_exp(const TruncatedTensor& l) {
  TruncatedTensor term = TruncatedTensor::unit(l.dim(), l.level());
  TruncatedTensor sum = term;
  for (int k = 1; k <= l.level(); ++k) {
    term = naive_mul(term, l);
    term *= 1.0 / k;
    sum += term;
  }
  return sum;
}

/// Signature by integrating dS = S ⊗ dx with RK4 along each linear segment.
inline TruncatedTensor signature_quadrature(const std::vector<std::vector<double>>& pts, int level, int steps = 64) {
  const int d = static_cast<int>(pts.front().size());
  TruncatedTensor S = TruncatedTensor::unit(d, level);
  auto rhs = [&](const TruncatedTensor& s, const std::vector<double>& v) {
    TruncatedTensor out(d, level);
    for (int k = 1; k <= level; ++k) {
      const std::size_t prev = k == 1 ? 1 : s.degree_size(k - 1);
      for (std::size_t w = 0; w < prev; ++w) {
        const double c = k == 1 ? s.scalar() : s.degree(k - 1)[w];
        for (int a = 0; a < d; ++a) out.degree(k)[w * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] += c * v[static_cast<std::size_t>(a)];
      }
    }
    return out;
  };
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) v[static_cast<std::size_t>(a)] = pts[i][static_cast<std::size_t>(a)] - pts[i - 1][static_cast<std::size_t>(a)];
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
      TruncatedTensor k1 = rhs(S, v);
      TruncatedTensor k2 = rhs(S + (0.5 * h) * k1, v);
      TruncatedTensor k3 = rhs(S + (0.5 * h) * k2, v);
      TruncatedTensor k4 = rhs(S + h * k3, v);
      S += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return S;
}

/// Level-2 iterated integrals ∫∫_{s<u<t} dx^i_s dx^j_u of a sampled curve by
/// the trapezoid rule on the increments.
inline std::vector<double> level2_quadrature(const std::vector<std::vector<double>>& pts) {
  const std::size_t d = pts.front().size();
  std::vector<double> out(d * d, 0.0);
  for (std::size_t k = 1; k < pts.size(); ++k)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double mid = 0.5 * (pts[k - 1][i] + pts[k][i]) - pts[0][i];
        out[i * d + j] += mid * (pts[k][j] - pts[k - 1][j]);
      }
  return out;
}

/// Shoelace signed area of a closed polygon in the (0,1)-plane.
inline double shoelace(const std::vector<std::vector<double>>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) a += pts[i][0] * pts[i + 1][1] - pts[i + 1][0] * pts[i][1];
  return 0.5 * a;
}

/// Matrix exponential by scaling and squaring of a Taylor series.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  int s = 0;
  double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2;
    ++s;
  }
  Eigen::MatrixXd B = A / std::ldexp(1.0, s);
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(A.rows(), A.cols()), T = E;
  for (int k = 1; k < 30; ++k) {
    T = T * B / k;
    E += T;
  }
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

}  // namespace testing
