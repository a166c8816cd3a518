#include <doctest.h>

#include <cmath>

#include "roughman/frame_bundle.hpp"
#include "roughman/rde.hpp"
#include "support.hpp"

using namespace roughman;
using namespace testing;

namespace {

const std::vector<std::vector<double>> kJ{{0.0, 1.0}, {-1.0, 0.0}};

Mat<double> random_matrix(int n, double scale) {
  Mat<double> A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = scale * uniform();
  return A;
}

VfOneForm rotations(std::vector<Eigen::Vector3d> ws) {
  std::vector<VectorField> fs;
  for (const auto& w : ws) fs.push_back(rotation_field(w));
  return VfOneForm(std::move(fs));
}

SolveOptions steps(int k, int substeps = 4) {
  SolveOptions o;
  o.steps_per_unit = 1 << k;
  o.substeps = substeps;
  return o;
}

/// f(x) = x₀x₁ + sin x₂ as a scalar map on R³.
SmoothMap product_sine() {
  return SmoothMap::make(3, 1, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    Vec<S> o(1);
    o(0) = x(0) * x(1) + sin(x(2));
    return o;
  });
}

RoughIntegrator sphere_run(const Vec<double>& x0, double t_scale = 1.0) {
  auto X = lift_function(
      [t_scale](double t) { return std::vector<double>{std::sin(3 * t) * t_scale, std::cos(2 * t) * t_scale}; }, 1.0,
      2049, 2.5);
  return RoughIntegrator::solve(make_sphere(1.0), rotations({{1, 0, 0}, {0, 1, 0}}), X, x0, steps(8));
}

}  // namespace

TEST_CASE("zero increment leaves the point fixed") {
  auto S = make_sphere(1.0);
  Vec<double> x0 = Eigen::Vector3d(0, 0, 1);
  auto r = log_ode_step(*S, rotations({{1, 0, 0}, {0, 1, 0}}), x0, TruncatedTensor(2, 3));
  CHECK(r.x == x0);
  CHECK_FALSE(r.blew_up);
  CHECK_THROWS_AS(log_ode_step(*S, rotations({{1, 0, 0}}), x0, TruncatedTensor(1, 2), 0), ContractViolation);
}

TEST_CASE("log-ODE step of linear fields is a matrix exponential") {
  auto E = make_plane(3);
  for (int rep = 0; rep < 20; ++rep) {
    Mat<double> A1 = random_matrix(3, 0.3), A2 = random_matrix(3, 0.3);
    VfOneForm F({linear_field(A1), linear_field(A2)});
    const double c1 = uniform(), c2 = uniform(), b = uniform();
    LieElement L = LieElement::letter(2, 2, 0).scaled(c1) + LieElement::letter(2, 2, 1).scaled(c2) +
                   lie_bracket(LieElement::letter(2, 2, 0), LieElement::letter(2, 2, 1)).scaled(b);
    Vec<double> x0 = Eigen::Vector3d(uniform(), uniform(), uniform());
    // [V1,V2](x) = (A2 A1 − A1 A2) x.
    Mat<double> M = c1 * A1 + c2 * A2 + b * (A2 * A1 - A1 * A2);
    Vec<double> exact = expm(M) * x0;
    CHECK((log_ode_step(*E, F, x0, L, 64).x - exact).norm() < 1e-10);
  }
}

TEST_CASE("bracket substitution matches the tensor operator field") {
  VfOneForm F({rotation_field({1.0, 0.2, 0.0}), quadratic_field(3, 2)});
  for (int rep = 0; rep < 20; ++rep) {
    auto L = random_lie(2, 3, 0.5).tensor();
    Vec<double> x = Eigen::Vector3d(uniform(), uniform(), uniform());
    CHECK((TensorOperator(F, L).field(x) - bracket_substituted_field(F, L)(x)).norm() < 1e-10);
  }
}

TEST_CASE("identity one-form reproduces the driving path") {
  auto E = make_plane(2);
  auto f = [](double t) { return std::vector<double>{std::cos(4 * t), t * t - t}; };
  auto X = lift_function(f, 1.0, 1025, 2.5);
  VfOneForm F({coordinate_field(2, 0), coordinate_field(2, 1)});
  Vec<double> x0 = Eigen::Vector2d(0.5, -2.0);
  RDEPath path = solve_rde(*E, *X, F, x0, steps(6));
  double worst = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    auto v = f(path.times[i]), v0 = f(0.0);
    worst = std::max(worst, std::abs(path.points[i](0) - x0(0) - (v[0] - v0[0])));
    worst = std::max(worst, std::abs(path.points[i](1) - x0(1) - (v[1] - v0[1])));
  }
  CHECK(worst < 1e-12);
  CHECK(path.times.back() == 1.0);
  CHECK(path.size() == 65);
}

TEST_CASE("quadratic growth blows up at the explosion time") {
  auto E = make_plane(1);
  VfOneForm F({quadratic_field(1, 0)});
  auto X = log_linear(LieElement::letter(1, 2, 0), 2.0, 2.0);
  Vec<double> x0 = Vec<double>::Ones(1);
  SolveOptions o = steps(10);
  RDEPath path = solve_rde(*E, *X, F, x0, o);
  CHECK(path.blow_up);
  CHECK(path.blow_up_time == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(path.at_time(0.5)(0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(path.at_time(0.75)(0) == doctest::Approx(4.0).epsilon(1e-9));
  auto theta = RoughIntegrator::solve(E, F, X, x0, o);
  CHECK(theta.blew_up());
  CHECK(theta.lifetime() == path.blow_up_time);
  auto safe = RoughIntegrator::solve(E, F, log_linear(LieElement::letter(1, 2, 0), 2.0, 0.5), x0, o);
  CHECK(std::isinf(safe.lifetime()));
}

TEST_CASE("Davie residual") {
  SUBCASE("constant fields are exact") {
    auto X = lift_spinning_signal(8, 1025);
    auto theta = RoughIntegrator::solve(make_plane(2), VfOneForm({coordinate_field(2, 0), coordinate_field(2, 1)}),
                                        X, Vec<double>::Zero(2), steps(8));
    auto rep = davie_residual(theta);
    CHECK(rep.exact);
    CHECK(rep.pass());
  }
  SUBCASE("linear fields under a pure area are exact") {
    Mat<double> A1 = random_matrix(2, 0.5), A2 = random_matrix(2, 0.5);
    auto theta = RoughIntegrator::solve(make_plane(2), VfOneForm({linear_field(A1), linear_field(A2)}), pure_area(kJ),
                                        Vec<double>(Eigen::Vector2d(1, 0)), steps(8, 8));
    CHECK(davie_residual(theta).pass());
  }
  SUBCASE("rotations on the sphere") {
    auto rep = davie_residual(sphere_run(Vec<double>(Eigen::Vector3d(0, 0, 1))));
    CHECK(rep.pass());
    if (!rep.exact) CHECK(rep.exponent > 1.0);
    CHECK(rep.window_lengths.size() == rep.residuals.size());
  }
}

TEST_CASE("lift through the zero connection keeps the fibre point") {
  auto theta = sphere_run(Vec<double>(Eigen::Vector3d(0, 1, 0)));
  Vec<double> y0 = Eigen::Vector2d(3.0, -1.0);
  auto lifted = lift_through_connection(theta, zero_connection(2, 3), make_plane(2), y0);
  RDEPath base = theta.path(), up = lifted.path();
  REQUIRE(base.size() == up.size());
  for (std::size_t i = 0; i < up.size(); ++i) {
    CHECK((up.points[i].head(3) - base.points[i]).norm() < 1e-12);
    CHECK((up.points[i].tail(2) - y0).norm() == 0.0);
  }
}

TEST_CASE("lift with G = p copies the base increments") {
  auto theta = sphere_run(Vec<double>(Eigen::Vector3d(1, 0, 0)));
  auto G = BundleConnectionForm::make(3, 3, [](const auto& in) {
    using S = typename std::decay_t<decltype(in)>::Scalar;
    return Vec<S>(in.tail(3));
  });
  auto lifted = lift_through_connection(theta, G, make_plane(3), Vec<double>::Zero(3));
  CHECK((lifted.end().tail(3) - (theta.end() - theta.start())).norm() < 1e-10);
}

TEST_CASE("integral of an exact one-form is the difference of endpoints") {
  auto f = product_sine();
  auto theta = sphere_run(Vec<double>(Eigen::Vector3d(0.6, 0, 0.8)));
  const double I = integrate_one_form(theta, exact_one_form(f));
  CHECK(I == doctest::Approx(f(theta.end())(0) - f(theta.start())(0)).epsilon(1e-9));
  Vec<double> c = Eigen::Vector3d(1.0, -2.0, 0.5);
  CHECK(integrate_one_form(theta, constant_one_form(c)) == doctest::Approx(c.dot(theta.end() - theta.start())));
}

TEST_CASE("connection form defect") {
  auto S = make_sphere(1.0);
  auto P = make_plane(3);
  std::vector<Vec<double>> xs, ys;
  for (int i = 0; i < 10; ++i) {
    xs.push_back(S->retract(Vec<double>(Eigen::Vector3d(uniform(), uniform(), uniform()))));
    ys.push_back(S->retract(Vec<double>(Eigen::Vector3d(uniform(), uniform(), uniform()))));
  }
  CHECK(connection_form_defect(zero_connection(3, 3), *P, *S, xs, ys) == 0.0);
  // p ↦ p on the sphere is not tangent at y.
  auto G = BundleConnectionForm::make(3, 3, [](const auto& in) {
    using S_ = typename std::decay_t<decltype(in)>::Scalar;
    return Vec<S_>(in.tail(3));
  });
  CHECK(connection_form_defect(G, *P, *S, xs, ys) > 1e-3);
  auto Q = BundleConnectionForm::make(1, 3, [](const auto& in) {
    using S_ = typename std::decay_t<decltype(in)>::Scalar;
    Vec<S_> o(1);
    o(0) = in(4) * in(4);
    return o;
  });
  CHECK(connection_form_defect(Q, *P, *make_plane(1), xs, {Vec<double>::Zero(1)}) > 1e-3);
}

TEST_CASE("push-forward by the identity and by affine maps") {
  auto E = make_plane(2);
  Mat<double> A1 = random_matrix(2, 0.5), A2 = random_matrix(2, 0.5);
  auto theta = RoughIntegrator::solve(E, VfOneForm({linear_field(A1), linear_field(A2)}),
                                      spinning_line({1.0, 0.5}, kJ), Vec<double>(Eigen::Vector2d(1, 1)), steps(7));
  auto id = affine_diffeomorphism(Mat<double>::Identity(2, 2), Vec<double>::Zero(2));
  CHECK(sup_distance(pushforward(theta, id).path(), theta.path()) < 1e-15);

  Mat<double> G(2, 2);
  G << 1.0, 2.0, -0.5, 1.5;
  auto g = affine_diffeomorphism(G, Vec<double>(Eigen::Vector2d(0.3, -0.7)));
  auto pushed = pushforward(theta, g);
  auto again = resolve(pushed, pushed.start());
  CHECK(sup_distance(pushed.path(), again.path()) < 1e-10);
}

TEST_CASE("rotations of the sphere commute with the solution map") {
  Eigen::Matrix3d R = expm(Mat<double>(hat({0.3, -1.1, 0.4})));
  auto g = affine_diffeomorphism(Mat<double>(R), Vec<double>::Zero(3));
  auto theta = sphere_run(Vec<double>(Eigen::Vector3d(0, 0.6, 0.8)));
  auto pushed = pushforward(theta, g, make_sphere(1.0));
  CHECK(sup_distance(pushed.path(), resolve(pushed, pushed.start()).path()) < 1e-10);
  // g_*(w×·) is the rotation field of R w.
  auto direct = RoughIntegrator::solve(make_sphere(1.0), rotations({R.col(0), R.col(1)}), theta.segments()[0].X,
                                       pushed.start(), steps(8));
  CHECK(sup_distance(pushed.path(), direct.path()) < 1e-10);
}

TEST_CASE("concatenation") {
  auto S = make_sphere(1.0);
  auto F2 = rotations({{1, 0, 0}, {0, 1, 0}});
  auto F3 = rotations({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  Vec<double> x0 = Eigen::Vector3d(0, 0, 1);
  auto a = RoughIntegrator::solve(S, F2, spinning_line({0.5, 0.2}, kJ), x0, steps(6));
  auto b = RoughIntegrator::solve(S, F3, pure_area({{0, 1, 0}, {-1, 0, 0.5}, {0, -0.5, 0}}, 2.5, 0.5), a.end(),
                                  steps(6));
  auto c = RoughIntegrator::solve(S, F2, lift_spinning_signal(8, 513, 2.5, 0.75), b.end(), steps(6));

  SUBCASE("is associative") {
    auto l = concatenate({concatenate({a, b}), c}), r = concatenate({a, concatenate({b, c})});
    CHECK(l.composite());
    CHECK(l.segments().size() == 3);
    CHECK(sup_distance(l.path(), r.path()) == 0.0);
    CHECK(l.t_end() == doctest::Approx(2.25));
    CHECK(l.path().size() == a.path().size() + b.path().size() + c.path().size() - 2);
    CHECK(l.segments()[2].t_offset == doctest::Approx(1.5));
  }
  SUBCASE("rejects a junction gap") {
    auto off = RoughIntegrator::solve(S, F2, spinning_line({0.5, 0.2}, kJ), Vec<double>(Eigen::Vector3d(1, 0, 0)),
                                      steps(6));
    CHECK_THROWS_AS(concatenate({a, off}), ContractViolation);
  }
  SUBCASE("a pure segment with zero area is constant") {
    auto z = RoughIntegrator::solve(S, F2, pure_area({{0, 0}, {0, 0}}), a.end(), steps(4));
    auto joined = concatenate({a, z});
    CHECK((joined.end() - a.end()).norm() == 0.0);
  }
  SUBCASE("resolving reproduces the composite") {
    auto joined = concatenate({a, b, c});
    CHECK(sup_distance(resolve(joined, joined.start()).path(), joined.path()) < 1e-12);
  }
}

TEST_CASE("mesh refinement converges") {
  auto X = spinning_line({1.0, -0.5}, {{0, 0.7}, {-0.7, 0}});
  auto F = rotations({{1, 0, 0}, {0, 1, 0}});
  Vec<double> x0 = Eigen::Vector3d(0, 0, 1);
  auto fine = RoughIntegrator::solve(make_sphere(1.0), F, X, x0, steps(10));
  double prev = 1.0;
  for (int k : {2, 3, 4}) {
    auto coarse = RoughIntegrator::solve(make_sphere(1.0), F, X, x0, steps(k, 1));
    const double err = (coarse.end() - fine.end()).norm();
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("solution depends continuously on the driver") {
  auto F = rotations({{1, 0, 0}, {0, 1, 0}});
  Vec<double> x0 = Eigen::Vector3d(0, 0, 1);
  auto run = [&](double a) {
    return RoughIntegrator::solve(make_sphere(1.0), F, spinning_line({1.0, 0.3}, {{0, a}, {-a, 0}}), x0, steps(8));
  };
  auto base = run(0.5);
  std::vector<double> ratios;
  for (double delta : {1e-2, 1e-3, 1e-4}) ratios.push_back(sup_distance(base.path(), run(0.5 + delta).path()) / delta);
  CHECK(ratios[0] > 0.0);
  CHECK(ratios[2] == doctest::Approx(ratios[1]).epsilon(0.02));
  CHECK(ratios[0] < 10.0);
}

TEST_CASE("horizontal lift of a spinning line is a one-parameter subgroup of SO(3)") {
  auto B = SurfaceFrameBundle::sphere(1.0);
  Vec<double> x0 = Eigen::Vector3d(0, 0, 1);
  Vec<double> e0 = B->default_state(x0);
  const double a1 = 1.0, a2 = 0.5, A12 = 0.7;
  auto X = spinning_line({a1, a2}, {{0, A12}, {-A12, 0}});
  auto theta = RoughIntegrator::solve(B->manifold(), B->canonical_horizontal_form(), X, e0, steps(10));

  // In g = [e1 e2 x]: H1 ↦ M1, H2 ↦ M2, V12 ↦ M12 acting on the right.
  Eigen::Matrix3d M1 = Eigen::Matrix3d::Zero(), M2 = Eigen::Matrix3d::Zero(), M12 = Eigen::Matrix3d::Zero();
  M1(0, 2) = 1;
  M1(2, 0) = -1;
  M2(1, 2) = 1;
  M2(2, 1) = -1;
  M12(1, 0) = 1;
  M12(0, 1) = -1;
  const Eigen::Matrix3d M = a1 * M1 + a2 * M2 + A12 * kCurvatureBracketSign * M12;
  const Eigen::Matrix3d g0 = B->frame_matrix(e0);
  RDEPath path = theta.path();
  double worst = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    Eigen::Matrix3d g = g0 * expm(Mat<double>(path.times[i] * M));
    Vec<double> ref(6);
    ref << g.col(2), g.col(0);
    worst = std::max(worst, (path.points[i] - ref).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst < 1e-8);
  // With the opposite vertical sign the flow is far away.
  const Eigen::Matrix3d wrong = a1 * M1 + a2 * M2 - A12 * kCurvatureBracketSign * M12;
  Eigen::Matrix3d g1 = g0 * expm(Mat<double>(wrong));
  CHECK((theta.end().tail(3) - Vec<double>(g1.col(0))).norm() > 0.1);
}

TEST_CASE("path metadata") {
  auto theta = sphere_run(Vec<double>(Eigen::Vector3d(0, 0, 1)));
  auto j = path_metadata(theta.path());
  CHECK(j["blow_up"]["flag"] == false);
  CHECK(j["substeps"] == 4);
}
