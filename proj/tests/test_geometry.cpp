#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roughman/frame_bundle.hpp"
#include "support.hpp"

using namespace roughman;
using namespace testing;

namespace {

Vec<double> random_on(const EmbeddedManifold& M) {
  Vec<double> y(M.ambient_dim());
  for (auto& c : y) c = uniform();
  return M.retract(y);
}

Vec<double> random_ambient(int m, double scale = 1.0) {
  Vec<double> v(m);
  for (auto& c : v) c = scale * uniform();
  return v;
}

/// Surface frame state at x with e₁ rotated by a random angle from the default.
Vec<double> random_frame(const SurfaceFrameBundle& B, const Vec<double>& x) {
  FrameBundlePoint p = B.unpack(B.default_state(x));
  const double a = uniform(-3.0, 3.0);
  p.frame.col(0) = std::cos(a) * p.frame.col(0) + std::sin(a) * p.frame.col(1);
  return B.pack(p);
}

std::vector<ManifoldPtr> manifolds() {
  return {make_plane(2), make_sphere(1.0), make_sphere(2.5), make_so3(),
          make_product({make_sphere(1.0), make_plane(2)})};
}

}  // namespace

TEST_CASE("sphere projector at the north pole") {
  auto S = make_sphere(1.0);
  Vec<double> n = Eigen::Vector3d(0, 0, 1);
  CHECK(S->tangent_project(n, Vec<double>(Eigen::Vector3d(0, 0, 1))).norm() < 1e-15);
  CHECK((S->tangent_project(n, Vec<double>(Eigen::Vector3d(1, 0, 0.5))) - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(S->tangent_project(Vec<double>(Eigen::Vector3d(0, 0, 1.1)), n), ContractViolation);
}

TEST_CASE("projectors are idempotent with rank equal to the dimension") {
  for (const auto& M : manifolds()) {
    for (int rep = 0; rep < 100; ++rep) {
      Vec<double> y = random_on(*M), v = random_ambient(M->ambient_dim());
      Mat<double> Q = M->projector(y);
      CHECK_MESSAGE((Q * (Q * v) - Q * v).norm() < 1e-12, M->name());
      CHECK(std::abs(Q.trace() - M->intrinsic_dim()) < 1e-10);
      CHECK((Q - Q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("retraction is normal and idempotent") {
  for (const auto& M : manifolds()) {
    for (int rep = 0; rep < 50; ++rep) {
      Vec<double> x = random_on(*M);
      Vec<double> y = x + random_ambient(M->ambient_dim(), 0.05);
      Vec<double> r = M->retract(y);
      CHECK_MESSAGE(M->defect(r) < 1e-12, M->name());
      CHECK((M->projector(r) * (y - r)).norm() < 1e-8);
      CHECK((M->retract(r) - r).norm() < 1e-12);
    }
  }
}

TEST_CASE("projection map agrees with the projector") {
  for (const auto& M : manifolds()) {
    auto P = M->projection_map();
    REQUIRE(P.has_value());
    Vec<double> y = random_on(*M), v = random_ambient(M->ambient_dim());
    Vec<double> in(2 * M->ambient_dim());
    in << y, v;
    CHECK(((*P)(in) - M->projector(y) * v).norm() < 1e-12);
  }
}

TEST_CASE("exponential maps stay on the manifold") {
  for (const auto& M : {make_sphere(1.5), make_so3()}) {
    Vec<double> y = random_on(*M);
    Vec<double> v = M->projector(y) * random_ambient(M->ambient_dim());
    auto z = M->exponential(y, v);
    REQUIRE(z.has_value());
    CHECK(M->defect(*z) < 1e-12);
  }
  Vec<double> n = Eigen::Vector3d(0, 0, 1);
  auto z = make_sphere(1.0)->exponential(n, Vec<double>(Eigen::Vector3d(std::numbers::pi / 2, 0, 0)));
  CHECK((*z - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("stock fields are tangent") {
  auto S = make_sphere(2.0);
  auto G = make_so3();
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector3d w(uniform(), uniform(), uniform());
    CHECK(tangency_defect(*S, rotation_field(w), random_on(*S)) < 1e-12);
    CHECK(tangency_defect(*G, left_invariant_field(w), random_on(*G)) < 1e-12);
  }
  auto F = projected_coordinate_form(*S);
  CHECK(F.dim_u() == 3);
  CHECK(tangency_defect(*S, F[1], random_on(*S)) < 1e-12);
}

TEST_CASE("bracket of a field with itself vanishes") {
  auto V = rotation_field({0.3, -0.2, 1.0});
  CHECK(lie_bracket(V, V, random_ambient(3)).norm() < 1e-10);
  CHECK_THROWS_AS(lie_bracket(V, V, random_ambient(3), 0.0), ContractViolation);
}

TEST_CASE("d/dx and x d/dy bracket to d/dy") {
  auto V1 = coordinate_field(2, 0), V2 = shear_field(2, 0, 1);
  for (int rep = 0; rep < 10; ++rep) {
    Vec<double> x = random_ambient(2, 3.0);
    CHECK((lie_bracket(V1, V2, x) - Eigen::Vector2d(0, 1)).norm() < 1e-10);
    CHECK((lie_bracket_field(V1, V2)(x) - Eigen::Vector2d(0, 1)).norm() < 1e-15);
  }
}

TEST_CASE("rotation field brackets match the matrix commutator") {
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Vector3d a(uniform(), uniform(), uniform()), b(uniform(), uniform(), uniform());
    Vec<double> x = random_ambient(3);
    Eigen::Vector3d oracle = (hat(b) * hat(a) - hat(a) * hat(b)) * Eigen::Vector3d(x);
    CHECK((lie_bracket(rotation_field(a), rotation_field(b), x, 1e-4) - oracle).norm() < 1e-6);
  }
}

TEST_CASE("exact and finite-difference brackets agree") {
  auto V = quadratic_field(3, 1), W = rotation_field({1.0, 0.5, -0.25});
  auto B = lie_bracket_field(V, W);
  for (int rep = 0; rep < 20; ++rep) {
    Vec<double> x = random_ambient(3);
    CHECK((B(x) - lie_bracket(V, W, x)).norm() < 1e-6);
  }
}

TEST_CASE("projection connection is metric") {
  auto S = make_sphere(1.0);
  ProjectionConnection nabla(S);
  for (int rep = 0; rep < 20; ++rep) {
    auto X = rotation_field({uniform(), uniform(), uniform()});
    auto Y = rotation_field({uniform(), uniform(), uniform()});
    auto Z = rotation_field({uniform(), uniform(), uniform()});
    Vec<double> x = random_on(*S);
    CHECK(nabla.metric_compatibility_defect(X, Y, Z, x) < 1e-8);
    CHECK(tangency_defect(*S, VectorField::make(3, [&](const auto& y) { return Y(y); }), x) < 1e-12);
    Vec<double> d = nabla.covariant_derivative(X, Y, x);
    CHECK(std::abs(d.dot(x)) < 1e-12);
  }
}

TEST_CASE("horizontal fields project to e(a)") {
  for (double r : {1.0, 2.0}) {
    auto B = SurfaceFrameBundle::sphere(r);
    for (int rep = 0; rep < 100; ++rep) {
      Vec<double> e = random_frame(*B, random_on(*B->base_manifold()));
      Vec<double> a = random_ambient(2);
      Vec<double> h = B->horizontal_field(e, a);
      CHECK((h.head(3) - B->unpack(e).frame * a).norm() < 1e-10);
      CHECK(B->horizontal_field(e, Vec<double>::Zero(2)).norm() == 0.0);
      CHECK(B->frame_defect(e) < 1e-10);
    }
  }
}

TEST_CASE("frames are parallel in flat space") {
  auto P = SurfaceFrameBundle::plane();
  Vec<double> x = Eigen::Vector3d(uniform(), uniform(), 0.0);
  Vec<double> e = random_frame(*P, x);
  Vec<double> h = P->horizontal_field(e, random_ambient(2));
  CHECK(h.tail(3).norm() == 0.0);
  FlatFrameBundle G(2);
  FrameBundlePoint p{random_ambient(2), Mat<double>(Eigen::Matrix2d(Eigen::Matrix2d::Identity() + 0.3 * Eigen::Matrix2d::Random()))};
  Vec<double> s = G.pack(p);
  Vec<double> hg = G.horizontal_field(s, random_ambient(2));
  CHECK(hg.tail(4).norm() == 0.0);
  Vec<double> in(8);
  in << s, hg.head(2);
  Vec<double> a = G.inverse_frame_map()(in);
  CHECK((hg.head(2) - p.frame * a).norm() < 1e-12);
}

TEST_CASE("Gauss curvature from the bracket of horizontal fields") {
  Vec<double> origin = Vec<double>::Zero(3);
  CHECK(std::abs(curvature_scalar(*SurfaceFrameBundle::plane(), origin)) < 1e-5);
  CHECK(curvature_scalar(*SurfaceFrameBundle::sphere(1.0), Vec<double>(Eigen::Vector3d(0, 0, 1))) ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(curvature_scalar(*SurfaceFrameBundle::sphere(2.0), Vec<double>(Eigen::Vector3d(0, 2, 0))) ==
        doctest::Approx(0.25).epsilon(4e-5));
  CHECK_THROWS_AS(curvature_scalar(FlatFrameBundle(2), Vec<double>::Zero(2)), ContractViolation);
}

TEST_CASE("bracket of horizontal fields is vertical") {
  for (double r : {1.0, 2.0}) {
    auto B = SurfaceFrameBundle::sphere(r);
    for (int rep = 0; rep < 10; ++rep) {
      double rem = 1.0;
      Vec<double> x = random_on(*B->base_manifold());
      double c = bracket_vertical_coefficient(*B, x, 1e-4, &rem);
      CHECK(rem < 1e-6);
      CHECK(std::abs(std::abs(c) - 1.0 / (r * r)) < 1e-4);
      CHECK(kCurvatureBracketSign * c == doctest::Approx(B->analytic_curvature()).epsilon(1e-4));
    }
  }
}

TEST_CASE("vertical field rotates the frame and fixes the base") {
  auto B = SurfaceFrameBundle::sphere(1.0);
  auto V = B->vertical_field();
  Vec<double> e = random_frame(*B, random_on(*B->base_manifold()));
  const FrameBundlePoint p0 = B->unpack(e);
  const double theta = 0.8;
  const int n = 400;
  const double h = theta / n;
  for (int k = 0; k < n; ++k) {
    Vec<double> k1 = V(e), k2 = V(Vec<double>(e + 0.5 * h * k1)), k3 = V(Vec<double>(e + 0.5 * h * k2)),
                k4 = V(Vec<double>(e + h * k3));
    e += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  const FrameBundlePoint p = B->unpack(e);
  CHECK((p.x - p0.x).norm() < 1e-8);
  Vec<double> expected = std::cos(theta) * p0.frame.col(0) + std::sin(theta) * p0.frame.col(1);
  CHECK((p.frame.col(0) - expected).norm() < 1e-8);
}

TEST_CASE("sphere frame matrix is a rotation") {
  auto B = SurfaceFrameBundle::sphere(1.0);
  Eigen::Matrix3d g = B->frame_matrix(random_frame(*B, random_on(*B->base_manifold())));
  CHECK((g.transpose() * g - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  CHECK(g.determinant() == doctest::Approx(1.0));
}

TEST_CASE("invalid frames are rejected") {
  auto B = SurfaceFrameBundle::sphere(1.0);
  Vec<double> bad(6);
  bad << 0, 0, 1, 1, 0, 0.2;
  CHECK_THROWS_AS(B->validate(bad), ContractViolation);
  CHECK_THROWS_AS(B->horizontal_field(bad, Vec<double>::Ones(2)), ContractViolation);
}

TEST_CASE("affine push-forward of a linear field") {
  Mat<double> A(2, 2), L(2, 2);
  A << 2, 1, 0, 1;
  L << 0, -1, 1, 0;
  auto g = affine_diffeomorphism(A, Vec<double>(Eigen::Vector2d(1, -1)));
  auto V = pushforward_field(g, linear_field(L));
  Vec<double> y = random_ambient(2);
  Vec<double> x = A.inverse() * (y - Eigen::Vector2d(1, -1));
  CHECK((V(y) - A * L * x).norm() < 1e-12);
  CHECK((g.differential(x, Vec<double>(Eigen::Vector2d(1, 0))) - A.col(0)).norm() < 1e-15);
}
