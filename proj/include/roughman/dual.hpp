#pragma once

// Forward-mode dual numbers, nestable: Dual<Dual<double>> carries mixed
// second derivatives and so on. Vector fields are written once as generic
// callables and evaluated at every nesting depth, which gives exact
// iterated directional derivatives for the F⊗ operators and brackets.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <type_traits>

namespace roughman {

template <class T>
struct Dual {
  T a{};  // value
  T b{};  // infinitesimal part

  Dual() = default;
  Dual(double v) : a(v), b(0.0) {}  // NOLINT: implicit by design of Eigen casts
  Dual(T value, T eps) : a(std::move(value)), b(std::move(eps)) {}

  Dual& operator+=(const Dual& o) { a += o.a; b += o.b; return *this; }
  Dual& operator-=(const Dual& o) { a -= o.a; b -= o.b; return *this; }
  Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
  Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> struct dual_depth : std::integral_constant<int, 0> {};
template <class T>
struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
template <class T> inline constexpr int dual_depth_v = dual_depth<T>::value;

// D0 = double, D1 = Dual<double>, ...
template <int K> struct dual_of { using type = Dual<typename dual_of<K - 1>::type>; };
template <> struct dual_of<0> { using type = double; };
template <int K> using D = typename dual_of<K>::type;

/// Deepest nesting supported by type-erased maps (see smooth_map.hpp).
inline constexpr int kMaxDualDepth = 5;

inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.a); }

template <class T> Dual<T> operator+(const Dual<T>& x, const Dual<T>& y) { return {x.a + y.a, x.b + y.b}; }
template <class T> Dual<T> operator-(const Dual<T>& x, const Dual<T>& y) { return {x.a - y.a, x.b - y.b}; }
template <class T> Dual<T> operator-(const Dual<T>& x) { return {-x.a, -x.b}; }
template <class T> Dual<T> operator*(const Dual<T>& x, const Dual<T>& y) { return {x.a * y.a, x.a * y.b + x.b * y.a}; }
template <class T> Dual<T> operator/(const Dual<T>& x, const Dual<T>& y) {
  T inv = T(1.0) / y.a;
  return {x.a * inv, (x.b * y.a - x.a * y.b) * inv * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& x, double s) { return {x.a + s, x.b}; }
template <class T> Dual<T> operator+(double s, const Dual<T>& x) { return {x.a + s, x.b}; }
template <class T> Dual<T> operator-(const Dual<T>& x, double s) { return {x.a - s, x.b}; }
template <class T> Dual<T> operator-(double s, const Dual<T>& x) { return {s - x.a, -x.b}; }
template <class T> Dual<T> operator*(const Dual<T>& x, double s) { return {x.a * s, x.b * s}; }
template <class T> Dual<T> operator*(double s, const Dual<T>& x) { return {x.a * s, x.b * s}; }
template <class T> Dual<T> operator/(const Dual<T>& x, double s) { return {x.a / s, x.b / s}; }
template <class T> Dual<T> operator/(double s, const Dual<T>& x) { return Dual<T>(s) / x; }

// Comparisons look at the value only.
template <class T> bool operator<(const Dual<T>& x, const Dual<T>& y) { return x.a < y.a; }
template <class T> bool operator>(const Dual<T>& x, const Dual<T>& y) { return x.a > y.a; }
template <class T> bool operator<=(const Dual<T>& x, const Dual<T>& y) { return x.a <= y.a; }
template <class T> bool operator>=(const Dual<T>& x, const Dual<T>& y) { return x.a >= y.a; }
template <class T> bool operator==(const Dual<T>& x, const Dual<T>& y) { return x.a == y.a && x.b == y.b; }
template <class T> bool operator!=(const Dual<T>& x, const Dual<T>& y) { return !(x == y); }

template <class T> Dual<T> sin(const Dual<T>& x) { using std::sin; using std::cos; return {sin(x.a), x.b * cos(x.a)}; }
template <class T> Dual<T> cos(const Dual<T>& x) { using std::sin; using std::cos; return {cos(x.a), -(x.b * sin(x.a))}; }
template <class T> Dual<T> exp(const Dual<T>& x) { using std::exp; T e = exp(x.a); return {e, x.b * e}; }
template <class T> Dual<T> log(const Dual<T>& x) { using std::log; return {log(x.a), x.b / x.a}; }
template <class T> Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T r = sqrt(x.a);
  return {r, x.b / (r * 2.0)};
}
template <class T> Dual<T> abs(const Dual<T>& x) { return value_of(x) < 0.0 ? -x : x; }


template <class S> using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S> using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// x + ε·v, one nesting level up.
template <class S>
Vec<Dual<S>> seed(const Vec<S>& x, const Vec<S>& v) {
  Vec<Dual<S>> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = Dual<S>(x[i], v[i]);
  return out;
}

template <class S>
Vec<S> eps_part(const Vec<Dual<S>>& y) {
  Vec<S> out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = y[i].b;
  return out;
}

template <class S>
Vec<S> value_part(const Vec<Dual<S>>& y) {
  Vec<S> out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = y[i].a;
  return out;
}

inline Vec<double> to_double(const Vec<double>& x) { return x; }
template <class S>
Vec<double> to_double(const Vec<S>& x) {
  Vec<double> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = value_of(x[i]);
  return out;
}

}  // namespace roughman

namespace Eigen {
template <class T>
struct NumTraits<roughman::Dual<T>> : NumTraits<double> {
  using Real = roughman::Dual<T>;
  using NonInteger = roughman::Dual<T>;
  using Nested = roughman::Dual<T>;
  using Literal = roughman::Dual<T>;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 2 * NumTraits<T>::ReadCost,
    AddCost = 2 * NumTraits<T>::AddCost,
    MulCost = 3 * NumTraits<T>::MulCost,
  };
};

template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<roughman::Dual<T>, double, BinaryOp> {
  using ReturnType = roughman::Dual<T>;
};
template <class T, typename BinaryOp>
struct ScalarBinaryOpTraits<double, roughman::Dual<T>, BinaryOp> {
  using ReturnType = roughman::Dual<T>;
};
}  // namespace Eigen
