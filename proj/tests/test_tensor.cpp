#include <doctest.h>

#include <array>

#include "roughman/tensor.hpp"
#include "support.hpp"

using namespace roughman;
using namespace testing;

TEST_CASE("degree arrays have size d^k") {
  TruncatedTensor t(3, 4);
  for (int k = 1; k <= 4; ++k) CHECK(t.degree(k).size() == static_cast<std::size_t>(std::pow(3, k)));
  CHECK(t.raw().size() == 1 + 3 + 9 + 27 + 81);
  CHECK(TruncatedTensor::unit(2, 3).scalar() == 1.0);
}

TEST_CASE("product at level one adds increments") {
  std::vector<double> a{1.0, -2.0}, b{0.5, 3.0};
  auto g = tensor_mul(TruncatedTensor::unit(2, 1) + TruncatedTensor::from_vector(a, 1),
                      TruncatedTensor::unit(2, 1) + TruncatedTensor::from_vector(b, 1));
  CHECK(g.scalar() == 1.0);
  CHECK(g.degree(1)[0] == doctest::Approx(1.5));
  CHECK(g.degree(1)[1] == doctest::Approx(1.0));
}

TEST_CASE("exponentials of one letter compose additively") {
  for (int n = 1; n <= 4; ++n) {
    auto u = TruncatedTensor::letter(3, n, 1);
    auto lhs = tensor_mul(tensor_exp(0.3 * u), tensor_exp(1.1 * u));
    CHECK(max_abs_diff(lhs, tensor_exp(1.4 * u)) < 1e-14);
  }
}

TEST_CASE("product matches the naive word product") {
  for (int rep = 0; rep < 50; ++rep) {
    int d = uniform_int(1, 4), n = uniform_int(1, 4);
    auto a = random_tensor(d, n, uniform()), b = random_tensor(d, n, uniform());
    CHECK(max_abs_diff(tensor_mul(a, b), naive_mul(a, b)) < 1e-13);
  }
}

TEST_CASE("product is associative") {
  for (int rep = 0; rep < 200; ++rep) {
    int d = uniform_int(1, 4), n = uniform_int(1, 4);
    auto a = random_tensor(d, n, 1.0), b = random_tensor(d, n, 1.0), c = random_tensor(d, n, 1.0);
    auto l = tensor_mul(tensor_mul(a, b), c), r = tensor_mul(a, tensor_mul(b, c));
    double scale = 1.0;
    for (double x : l.raw()) scale = std::max(scale, std::abs(x));
    CHECK(max_abs_diff(l, r) <= 1e-13 * scale);
  }
}

TEST_CASE("shape mismatch is rejected") {
  CHECK_THROWS_AS(tensor_mul(TruncatedTensor(2, 2), TruncatedTensor(3, 2)), ContractViolation);
  CHECK_THROWS_AS(tensor_mul(TruncatedTensor(2, 2), TruncatedTensor(2, 3)), ContractViolation);
}

TEST_CASE("exp of zero is the unit") {
  CHECK(max_abs_diff(tensor_exp(TruncatedTensor(3, 4)), TruncatedTensor::unit(3, 4)) == 0.0);
}

TEST_CASE("exp of an area at level two stops after one term") {
  TruncatedTensor L(2, 2);
  L.degree(2)[1] = 1.0;
  L.degree(2)[2] = -1.0;
  CHECK(max_abs_diff(tensor_exp(L), TruncatedTensor::unit(2, 2) + L) == 0.0);
}

TEST_CASE("exp needs a zero scalar part; log and inverse need scalar one") {
  auto t = random_tensor(2, 3, 0.5);
  CHECK_THROWS_AS(tensor_exp(t), ContractViolation);
  CHECK_THROWS_AS(tensor_log(t), ContractViolation);
  CHECK_THROWS_AS(group_inverse(t), ContractViolation);
}

TEST_CASE("exp agrees with the term-by-term series") {
  for (int rep = 0; rep < 100; ++rep) {
    auto L = random_lie(uniform_int(1, 4), uniform_int(1, 4)).tensor();
    CHECK(max_abs_diff(tensor_exp(L), series_exp(L)) < 1e-12);
  }
}

TEST_CASE("log inverts exp on Lie elements") {
  for (int rep = 0; rep < 200; ++rep) {
    auto L = random_lie(uniform_int(1, 4), 4).tensor();
    auto back = tensor_log(tensor_exp(L));
    double scale = 1.0;
    for (double x : L.raw()) scale = std::max(scale, std::abs(x));
    CHECK(max_abs_diff(back, L) <= 1e-12 * scale);
  }
}

TEST_CASE("log of simple group elements") {
  CHECK(max_abs_diff(tensor_log(TruncatedTensor::unit(2, 3)), TruncatedTensor(2, 3)) == 0.0);
  auto line = 0.7 * TruncatedTensor::letter(2, 3, 0);
  CHECK(max_abs_diff(tensor_log(tensor_exp(line)), line) < 1e-15);
  TruncatedTensor A(2, 2);
  A.degree(2)[1] = 0.4;
  A.degree(2)[2] = -0.4;
  CHECK(max_abs_diff(tensor_log(TruncatedTensor::unit(2, 2) + A), A) == 0.0);
}

TEST_CASE("group inverse") {
  auto u = random_lie(3, 4).tensor();
  CHECK(max_abs_diff(group_inverse(tensor_exp(u)), tensor_exp(-1.0 * u)) < 1e-12);
  CHECK(max_abs_diff(group_inverse(TruncatedTensor::unit(3, 4)), TruncatedTensor::unit(3, 4)) == 0.0);
  for (int rep = 0; rep < 100; ++rep) {
    auto g = tensor_exp(random_lie(uniform_int(1, 4), 3).tensor());
    auto h = group_inverse(g);
    CHECK(max_abs_diff(tensor_mul(g, h), TruncatedTensor::unit(g.dim(), 3)) < 1e-12);
    CHECK(max_abs_diff(h, neumann_inverse(g)) < 1e-12);
  }
}

TEST_CASE("signature of a segment is exp of its increment") {
  std::vector<std::vector<double>> pts{{0.1, 0.2, -0.3}, {1.0, -0.5, 0.25}};
  std::vector<double> v{0.9, -0.7, 0.55};
  CHECK(max_abs_diff(signature_piecewise_linear(pts, 4), exp_vector(v, 4)) < 1e-15);
  CHECK_THROWS_AS(signature_piecewise_linear({{0.0, 0.0}}, 2), ContractViolation);
}

TEST_CASE("two-segment signature matches quadrature and the Chen product") {
  std::vector<std::vector<double>> pts{{0.0, 0.0}, {0.6, 0.2}, {0.3, 1.0}};
  auto S = signature_piecewise_linear(pts, 4);
  CHECK(max_abs_diff(S, signature_quadrature(pts, 4)) < 1e-10);
  auto chen = tensor_mul(signature_piecewise_linear({pts[0], pts[1]}, 4), signature_piecewise_linear({pts[1], pts[2]}, 4));
  CHECK(max_abs_diff(S, chen) < 1e-15);
}

TEST_CASE("unit square loop has zero increment and unit area") {
  std::vector<std::vector<double>> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  auto S = signature_piecewise_linear(sq, 2);
  CHECK(std::abs(S.degree(1)[0]) < 1e-15);
  CHECK(std::abs(S.degree(1)[1]) < 1e-15);
  const double area = 0.5 * (S.degree(2)[1] - S.degree(2)[2]);
  CHECK(area == doctest::Approx(shoelace(sq)).epsilon(1e-14));
  CHECK(std::abs(area) == doctest::Approx(1.0));
}

TEST_CASE("random polygons: quadrature, reversal and Lie membership") {
  for (int rep = 0; rep < 20; ++rep) {
    int d = uniform_int(2, 3);
    auto pts = random_polygon(d, uniform_int(3, 8));
    auto S = signature_piecewise_linear(pts, 4);
    CHECK(max_abs_diff(S, signature_quadrature(pts, 4)) < 1e-10);
    auto rev = pts;
    std::reverse(rev.begin(), rev.end());
    CHECK(max_abs_diff(group_inverse(S), signature_piecewise_linear(rev, 4)) < 1e-12);
    CHECK(check_lie(S, 1e-10).pass);
  }
}

TEST_CASE("Lie check flags a symmetric level-two part") {
  for (int rep = 0; rep < 20; ++rep) CHECK(check_lie(tensor_exp(random_lie(3, 4).tensor())).pass);
  TruncatedTensor g = TruncatedTensor::unit(2, 2);
  g.degree(2)[1] = 1.0;
  auto rep = check_lie(g);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.degree_pass[2]);
  CHECK(rep.abs_violation[2] == doctest::Approx(0.5));
}

TEST_CASE("Dynkin map scales Lie polynomials by their degree") {
  for (int rep = 0; rep < 20; ++rep) {
    auto L = random_lie(3, 4).tensor();
    for (int k = 1; k <= 4; ++k) {
      auto r = dynkin_map(L.degree(k), 3, k);
      for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == doctest::Approx(k * L.degree(k)[i]).epsilon(1e-12));
    }
  }
  TruncatedTensor t(2, 2);
  t.degree(2)[1] = 1.0;
  CHECK_THROWS_AS((void)LieElement(t), ContractViolation);
}

TEST_CASE("Lie projection keeps Lie elements and kills the symmetric part") {
  auto L = random_lie(2, 4).tensor();
  CHECK(max_abs_diff(lie_projection(L), L) < 1e-13);
  TruncatedTensor sym(2, 2);
  sym.degree(2)[1] = 1.0;
  sym.degree(2)[2] = 1.0;
  CHECK(max_abs_diff(lie_projection(sym), TruncatedTensor(2, 2)) < 1e-15);
}

TEST_CASE("norms") {
  TruncatedTensor t(2, 2);
  t.degree(1)[0] = 3.0;
  t.degree(1)[1] = -4.0;
  t.degree(2)[3] = 16.0;
  CHECK(degree_norm(t, 1) == 7.0);
  CHECK(homogeneous_norm(t) == doctest::Approx(7.0));
}

TEST_CASE("JSON roundtrip") {
  auto t = random_tensor(3, 3, 1.0);
  auto back = tensor_from_json(to_json(t));
  CHECK(max_abs_diff(t, back) == 0.0);
  nlohmann::json bad = to_json(t);
  bad["data"][2].erase(0);
  CHECK_THROWS_AS(tensor_from_json(bad), ContractViolation);
}
