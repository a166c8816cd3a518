#include "roughman/fields.hpp"

#include <cmath>

namespace roughman {

VectorField::VectorField(SmoothMap map, std::string regularity)
    : map_(std::move(map)), regularity_(std::move(regularity)) {
  require(!map_.empty(), "VectorField: empty map");
  require(map_.in_dim() == map_.out_dim(), "VectorField '" + map_.name() + "': must map R^m to R^m");
}

VfOneForm::VfOneForm(std::vector<VectorField> fields) : fields_(std::move(fields)) {
  require(!fields_.empty(), "VfOneForm: needs at least one field");
  for (const auto& f : fields_)
    require(f.dim() == fields_.front().dim(), "VfOneForm: fields live in different ambient dimensions");
}

Vec<double> VfOneForm::apply(const Vec<double>& x, const Vec<double>& u) const {
  require(u.size() == dim_u(), "VfOneForm::apply: u has the wrong dimension");
  Vec<double> out = Vec<double>::Zero(ambient_dim());
  for (int i = 0; i < dim_u(); ++i)
    if (u[i] != 0.0) out += u[i] * fields_[static_cast<std::size_t>(i)](x);
  return out;
}

VectorField coordinate_field(int m, int i) {
  require(i >= 0 && i < m, "coordinate_field: index out of range");
  return VectorField::make(
      m,
      [m, i](const auto& x) {
        std::decay_t<decltype(x)> out = std::decay_t<decltype(x)>::Zero(m);
        out[i] = 1.0;
        return out;
      },
      "e" + std::to_string(i + 1));
}

VectorField linear_field(const Mat<double>& A, std::string name) {
  require(A.rows() == A.cols(), "linear_field: matrix must be square");
  const int m = static_cast<int>(A.rows());
  return VectorField::make(
      m,
      [A, m](const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V out = V::Zero(m);
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c)
            if (A(r, c) != 0.0) out[r] += A(r, c) * x[c];
        return out;
      },
      std::move(name));
}

VectorField shear_field(int m, int source, int target) {
  require(source >= 0 && source < m && target >= 0 && target < m, "shear_field: index out of range");
  return VectorField::make(
      m,
      [m, source, target](const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V out = V::Zero(m);
        out[target] = x[source];
        return out;
      },
      "shear");
}

VectorField quadratic_field(int m, int i) {
  require(i >= 0 && i < m, "quadratic_field: index out of range");
  return VectorField::make(
      m,
      [m, i](const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V out = V::Zero(m);
        out[i] = x[i] * x[i];
        return out;
      },
      "quadratic");
}

VectorField rotation_field(const Eigen::Vector3d& w) {
  return VectorField::make(
      3,
      [w](const auto& x) {
        using V = std::decay_t<decltype(x)>;
        V out(3);
        out[0] = w.y() * x[2] - w.z() * x[1];
        out[1] = w.z() * x[0] - w.x() * x[2];
        out[2] = w.x() * x[1] - w.y() * x[0];
        return out;
      },
      "rotation");
}

Eigen::Matrix3d hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d h;
  h << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return h;
}

VectorField left_invariant_field(const Eigen::Vector3d& w) {
  const Eigen::Matrix3d A = hat(w);
  return VectorField::make(
      9,
      [A](const auto& y) {
        using V = std::decay_t<decltype(y)>;
        // column-major g; (gA)_{rc} = Σ_k g_{rk} A_{kc}
        V out = V::Zero(9);
        for (int c = 0; c < 3; ++c)
          for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
              if (A(k, c) != 0.0) out[3 * c + r] += y[3 * k + r] * A(k, c);
        return out;
      },
      "left_invariant");
}

VfOneForm projected_coordinate_form(const EmbeddedManifold& M) {
  auto q = M.projection_map();
  require(q.has_value(), "projected_coordinate_form: " + M.name() + " has no projection map");
  const int m = M.ambient_dim();
  std::vector<VectorField> fields;
  for (int i = 0; i < m; ++i) {
    SmoothMap Q = *q;
    fields.push_back(VectorField::make(
        m,
        [Q, m, i](const auto& x) {
          using V = std::decay_t<decltype(x)>;
          V z = V::Zero(2 * m);
          z.head(m) = x;
          z[m + i] = 1.0;
          return V(Q(z));
        },
        "Qe" + std::to_string(i + 1)));
  }
  return VfOneForm(std::move(fields));
}

double tangency_defect(const EmbeddedManifold& M, const VectorField& V, const Vec<double>& x) {
  const Vec<double> v = V(x);
  return (M.projector(x) * v - v).lpNorm<Eigen::Infinity>();
}

Vec<double> lie_bracket(const VectorField& V, const VectorField& W, const Vec<double>& x, double h,
                        const EmbeddedManifold* M) {
  require(h > 0.0, "lie_bracket: step h must be positive");
  require(V.dim() == W.dim() && x.size() == V.dim(), "lie_bracket: dimension mismatch");
  const Vec<double> v = V(x);
  const Vec<double> w = W(x);
  const Vec<double> dw_v = (W(Vec<double>(x + h * v)) - W(Vec<double>(x - h * v))) / (2 * h);
  const Vec<double> dv_w = (V(Vec<double>(x + h * w)) - V(Vec<double>(x - h * w))) / (2 * h);
  Vec<double> out = dw_v - dv_w;
  if (M != nullptr) out = M->projector(x) * out;
  return out;
}

VectorField lie_bracket_field(const VectorField& V, const VectorField& W) {
  require(V.dim() == W.dim(), "lie_bracket_field: dimension mismatch");
  return VectorField::make(
      V.dim(),
      [V, W](const auto& x) {
        using V_t = std::decay_t<decltype(x)>;
        using S = typename V_t::Scalar;
        if constexpr (dual_depth_v<S> < kMaxDualDepth) {
          const V_t v = V(x);
          const V_t w = W(x);
          return V_t(eps_part(W(seed(x, v))) - eps_part(V(seed(x, w))));
        } else {
          throw ContractViolation("lie_bracket_field: dual nesting exhausted");
          return V_t(x);
        }
      },
      "[" + V.name() + "," + W.name() + "]");
}

Vec<double> ProjectionConnection::covariant_derivative(const VectorField& X, const VectorField& Y,
                                                       const Vec<double>& x) const {
  return M_->tangent_project(x, directional_derivative(Y.map(), x, X(x)));
}

double ProjectionConnection::metric_compatibility_defect(const VectorField& X, const VectorField& Y,
                                                         const VectorField& Z, const Vec<double>& x,
                                                         double h) const {
  const Vec<double> v = M_->tangent_project(x, X(x));
  auto point = [&](double t) -> Vec<double> {
    if (auto e = M_->exponential(x, t * v)) return *e;
    return M_->retract(x + t * v);
  };
  auto inner = [&](const Vec<double>& p) {
    const Mat<double> Q = M_->projector(p);
    return (Q * Y(p)).dot(Q * Z(p));
  };
  const double lhs = (inner(point(h)) - inner(point(-h))) / (2 * h);
  // Tangential parts of Y, Z define the sections whose inner product is differentiated.
  const Mat<double> Q = M_->projector(x);
  auto tangent_part = [&](const VectorField& F) {
    auto Qmap = M_->projection_map();
    if (!Qmap) return Vec<double>(Q * directional_derivative(F.map(), x, v));
    const int m = M_->ambient_dim();
    Vec<Dual<double>> z(2 * m);
    const Vec<Dual<double>> xd = seed(x, v);
    z.head(m) = xd;
    z.tail(m) = F(xd);
    return Vec<double>(Q * eps_part((*Qmap)(z)));
  };
  const double rhs = tangent_part(Y).dot(Q * Z(x)) + (Q * Y(x)).dot(tangent_part(Z));
  return std::abs(lhs - rhs);
}

Vec<double> Diffeomorphism::differential(const Vec<double>& x, const Vec<double>& v) const {
  return directional_derivative(forward, x, v);
}

Diffeomorphism affine_diffeomorphism(const Mat<double>& A, const Vec<double>& b) {
  require(A.rows() == A.cols() && A.rows() == b.size(), "affine_diffeomorphism: shape mismatch");
  Eigen::FullPivLU<Mat<double>> lu(A);
  require(lu.isInvertible(), "affine_diffeomorphism: matrix is singular");
  const Mat<double> Ai = lu.inverse();
  const int m = static_cast<int>(A.rows());
  auto affine = [m](Mat<double> M, Vec<double> c) {
    return [M, c, m](const auto& x) {
      using V = std::decay_t<decltype(x)>;
      V out(m);
      for (int r = 0; r < m; ++r) {
        out[r] = x[0] * M(r, 0) + c[r];
        for (int k = 1; k < m; ++k) out[r] += x[k] * M(r, k);
      }
      return out;
    };
  };
  Diffeomorphism g;
  g.forward = SmoothMap::make(m, m, affine(A, b), "affine");
  g.inverse = SmoothMap::make(m, m, affine(Ai, Vec<double>(-Ai * b)), "affine^-1");
  return g;
}

VectorField pushforward_field(const Diffeomorphism& g, const VectorField& V) {
  require(g.forward.in_dim() == V.dim(), "pushforward_field: dimension mismatch");
  return VectorField::make(
      V.dim(),
      [g, V](const auto& y) {
        using V_t = std::decay_t<decltype(y)>;
        using S = typename V_t::Scalar;
        if constexpr (dual_depth_v<S> < kMaxDualDepth) {
          const V_t x = g.inverse(y);
          return V_t(eps_part(g.forward(seed(x, V(x)))));
        } else {
          throw ContractViolation("pushforward_field: dual nesting exhausted");
          return V_t(y);
        }
      },
      "push(" + V.name() + ")", V.regularity());
}

}  // namespace roughman
