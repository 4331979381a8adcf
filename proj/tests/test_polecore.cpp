#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitroot/errors.hpp"
#include "unitroot/laurent.hpp"
#include "unitroot/polecore.hpp"
#include "unitroot/simkit.hpp"

using namespace unitroot;

namespace {

MatrixPolynomial scalar_poly(std::vector<double> c) {
  std::vector<Mat> coeffs;
  for (double v : c) coeffs.push_back(Mat::Constant(1, 1, v));
  return MatrixPolynomial(std::move(coeffs));
}

MatrixPolynomial pair_var() {
  return MatrixPolynomial::from_var({0.5 * Mat::Ones(2, 2)});
}

// diag(1 - z, (1 - z)^2)
MatrixPolynomial mixed_diag() {
  Mat A0 = Mat::Identity(2, 2);
  Mat A1(2, 2), A2(2, 2);
  A1 << -1, 0, 0, -2;
  A2 << 0, 0, 0, 1;
  return MatrixPolynomial({A0, A1, A2});
}

}  // namespace

TEST_CASE("simple pole: cointegrated pair") {
  PoleReport rep = detect_pole_order(pair_var());
  CHECK(rep.m == 1);
  CHECK(rep.mu == 1);
  CHECK(rep.premise_ok);
  CHECK(rep.a_fact.r == 1);
  REQUIRE(rep.chain.size() == 1);
  CHECK(rep.chain[0].K.rows() == 1);
  CHECK(rep.chain[0].K(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));

  Mat expected = -0.5 * Mat::Ones(2, 2);
  CHECK((*rep.n_leading - expected).norm() < 1e-12);
}

TEST_CASE("second-order pole: diag(1-z, (1-z)^2)") {
  PoleReport rep = detect_pole_order(mixed_diag());
  CHECK(rep.m == 2);
  CHECK(rep.mu == 3);

  Mat th1_expected(2, 2);
  th1_expected << -1, 0, 0, 0;
  CHECK((*rep.theta1 - th1_expected).norm() < 1e-12);

  Mat ab2_expected(2, 2);
  ab2_expected << 0, 0, 0, 1;
  CHECK((rep.a_brackets[1] - ab2_expected).norm() < 1e-12);
  CHECK((*rep.n_leading - ab2_expected).norm() < 1e-12);  // N_{-2} = diag(0,1)

  // Lambda_1 vanishes because A(1) = 0 makes A^+ = 0
  Mat n1(2, 2);
  n1 << -1, 0, 0, 0;
  Mat lam = lambda_theta(rep, {*rep.n_leading, n1}, 1);
  CHECK(lam.norm() < 1e-12);

  DecompositionReport dec = decomposition_check(rep, {*rep.n_leading, n1});
  CHECK(dec.max_residual < 1e-12);
}

TEST_CASE("scalar (1-z)^2") {
  PoleReport rep = detect_pole_order(scalar_poly({1, -2, 1}));
  CHECK(rep.m == 2);
  CHECK((*rep.n_leading)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.theta1->norm() < 1e-12);
  Mat lam = lambda_theta(rep, {Mat::Constant(1, 1, 1.0), Mat::Zero(1, 1)}, 1);
  CHECK(lam.norm() < 1e-12);
}

TEST_CASE("no pole when A(1) is invertible") {
  PoleReport rep = detect_pole_order(scalar_poly({1, -0.5}));
  CHECK(rep.m == 0);
  CHECK_FALSE(rep.n_leading.has_value());
  CHECK_THROWS_AS(leading_matrix(rep), InputError);
}

TEST_CASE("pole order beyond 4 is rejected") {
  // (1 - z)^5
  CHECK_THROWS_AS(detect_pole_order(scalar_poly({1, -5, 10, -10, 5, -1})),
                  UnsupportedOrderError);
}

TEST_CASE("recomputed Theta and A-bracket matrices match the cached chain") {
  SmithSpec spec;
  spec.n = 3;
  spec.degrees = {3, 1, 0};
  spec.seed = 99;
  PoleReport rep = detect_pole_order(generate_smith_model(spec).poly);
  REQUIRE(rep.m == 3);
  CHECK((compute_theta(rep, 1) - *rep.theta1).norm() < 1e-9);
  CHECK((compute_theta(rep, 2) - *rep.theta2).norm() < 1e-9);
  for (int i = 1; i <= 3; ++i)
    CHECK((compute_a_bracket(rep, i) -
           rep.a_brackets[static_cast<size_t>(i - 1)]).norm() < 1e-9);
}

TEST_CASE("argument validation") {
  PoleReport rep = detect_pole_order(pair_var());
  CHECK_THROWS_AS(compute_theta(rep, 3), InputError);
  CHECK_THROWS_AS(compute_theta(rep, 2), SequencingError);  // chain ends at K_1
  CHECK_THROWS_AS(compute_a_bracket(rep, 5), UnsupportedOrderError);
  CHECK_THROWS_AS(lambda_theta(rep, {Mat::Zero(2, 2)}, 1), InputError);
}

TEST_CASE("structural decomposition on oracle coefficients, deep poles") {
  for (int m = 3; m <= 4; ++m) {
    SmithSpec spec;
    spec.n = 3;
    spec.degrees = {m, 1, 0};
    spec.seed = 7 + m;
    MatrixPolynomial P = generate_smith_model(spec).poly;
    PoleReport rep = detect_pole_order(P);
    REQUIRE(rep.m == m);
    LaurentExpansion exp = contour_auto(P, -m, 0);
    REQUIRE(exp.m == m);
    DecompositionReport dec = decomposition_check(rep, exp.principal);
    CHECK(dec.max_residual < 1e-8);
    // the deeper-subspace entries must be present for theta = 1 (and
    // theta = 2 when m = 4)
    int depth1 = 0;
    for (const auto& e : dec.entries)
      if (e.depth == 1) ++depth1;
    CHECK(depth1 == (m == 4 ? 2 : 1));
  }
}
