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

}  // namespace

TEST_CASE("contour oracle: scalar 1 - z") {
  LaurentExpansion e = contour_coefficients(scalar_poly({1, -1}), -1, 1, 0.1, 256);
  CHECK(e.m == 1);
  CHECK(e.coeff(-1)(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(e.coeff(0)(0, 0)) < 1e-12);
  CHECK(std::abs(e.coeff(1)(0, 0)) < 1e-12);
  CHECK(e.imag_leak < 1e-12);
}

TEST_CASE("contour oracle: scalar 1 - 0.5z has no principal part") {
  LaurentExpansion e = contour_coefficients(scalar_poly({1, -0.5}), -1, 1, 0.1, 256);
  CHECK(e.m == 0);
  CHECK(e.coeff(0)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(e.coeff(1)(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("contour oracle: block diagonal combination") {
  Mat A0 = Mat::Identity(2, 2);
  Mat A1(2, 2);
  A1 << -1, 0, 0, -0.5;
  LaurentExpansion e =
      contour_coefficients(MatrixPolynomial({A0, A1}), -1, 0, 0.1, 256);
  Mat nm1(2, 2), n0(2, 2);
  nm1 << -1, 0, 0, 0;
  n0 << 0, 0, 0, 2;
  CHECK((e.coeff(-1) - nm1).norm() < 1e-12);
  CHECK((e.coeff(0) - n0).norm() < 1e-12);
}

TEST_CASE("contour preconditions and failure modes") {
  MatrixPolynomial P = scalar_poly({1, -1});
  CHECK_THROWS_AS(contour_coefficients(P, -1, 0, 0.1, 100), InputError);
  CHECK_THROWS_AS(contour_coefficients(P, -1, 0, 0.1, 32), InputError);
  CHECK_THROWS_AS(contour_coefficients(P, -1, 0, -0.1, 256), InputError);
  CHECK_THROWS_AS(contour_coefficients(P, 1, -1, 0.1, 256), InputError);
  // contour through the second root of det: (1-z)(1-2z) has a root at 0.5,
  // and radius 0.5 passes straight through it
  CHECK_THROWS_AS(contour_coefficients(scalar_poly({1, -3, 2}), -1, 0, 0.5, 256),
                  ContourError);
}

TEST_CASE("default radius respects nearby roots") {
  // (1-z)(1-0.9z): root at 1/0.9, distance 1/9 from 1, half that is safe
  RootReport r = det_roots(scalar_poly({1.0, -1.9, 0.9}));
  CHECK(default_radius(r) == doctest::Approx(1.0 / 18.0).epsilon(1e-6));
  // no other roots: capped at 0.1
  CHECK(default_radius(det_roots(scalar_poly({1, -1}))) == doctest::Approx(0.1));
}

TEST_CASE("node doubling and radius halving leave coefficients unchanged") {
  SmithSpec spec;
  spec.n = 3;
  spec.degrees = {2, 1, 0};
  spec.seed = 17;
  MatrixPolynomial P = generate_smith_model(spec).poly;
  LaurentExpansion a = contour_coefficients(P, -2, 2, 0.1, 512);
  LaurentExpansion b = contour_coefficients(P, -2, 2, 0.1, 1024);
  LaurentExpansion c = contour_coefficients(P, -2, 2, 0.05, 512);
  for (int j = -2; j <= 2; ++j) {
    const double scale = std::max(1.0, a.coeff(j).norm());
    CHECK((a.coeff(j) - b.coeff(j)).norm() / scale < 1e-10);
    CHECK((a.coeff(j) - c.coeff(j)).norm() / scale < 1e-8);
  }
}

TEST_CASE("fundamental identities hold for oracle output") {
  MatrixPolynomial P = scalar_poly({1, -1});
  LaurentExpansion e = contour_coefficients(P, -1, 1, 0.1, 256);
  IdentityReport rep = verify_fundamental_identities(e, P);
  CHECK(rep.max_residual < 1e-10);
  CHECK(rep.pass);

  // corrupting N_{-1} by +0.1 must surface in the h = 1 identity
  e.principal[0](0, 0) += 0.1;
  IdentityReport bad = verify_fundamental_identities(e, P);
  CHECK(bad.left_residuals[1] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_FALSE(bad.pass);
}

TEST_CASE("fundamental identities reduce to Taylor consistency for m = 0") {
  MatrixPolynomial P = scalar_poly({1, -0.5});
  LaurentExpansion e = contour_coefficients(P, -1, 3, 0.1, 256);
  REQUIRE(e.m == 0);
  IdentityReport rep = verify_fundamental_identities(e, P);
  CHECK(rep.max_residual < 1e-10);
}

TEST_CASE("toeplitz reconstruction: scalar 1 - z, q = 1") {
  ToeplitzResult t = toeplitz_reconstruct(scalar_poly({1, -1}), 1, 1);
  CHECK(t.exp.coeff(-1)(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::abs(t.exp.coeff(0)(0, 0)) < 1e-12);
  CHECK(std::abs(t.exp.coeff(1)(0, 0)) < 1e-12);
  CHECK(t.residual < 1e-12);
}

TEST_CASE("toeplitz reconstruction: scalar (1-z)^2") {
  // q = 0 leaves the principal block undetermined and must be refused
  CHECK_THROWS_AS(toeplitz_reconstruct(scalar_poly({1, -2, 1}), 2, 0),
                  InputError);
  ToeplitzResult t = toeplitz_reconstruct(scalar_poly({1, -2, 1}), 2, 1);
  CHECK(t.exp.coeff(-2)(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(t.exp.coeff(-1)(0, 0)) < 1e-12);
  CHECK(std::abs(t.exp.coeff(0)(0, 0)) < 1e-12);
}

TEST_CASE("toeplitz reconstruction: m = 0 degenerates to Taylor coefficients") {
  MatrixPolynomial P = scalar_poly({1, -0.5});
  ToeplitzResult t = toeplitz_reconstruct(P, 0, 2);
  LaurentExpansion e = contour_coefficients(P, 0, 2, 0.1, 256);
  for (int j = 0; j <= 2; ++j)
    CHECK((t.exp.coeff(j) - e.coeff(j)).norm() < 1e-10);
}

TEST_CASE("toeplitz reconstruction matches the oracle on a matrix model") {
  SmithSpec spec;
  spec.n = 3;
  spec.degrees = {2, 2, 0};
  spec.seed = 4;
  MatrixPolynomial P = generate_smith_model(spec).poly;
  LaurentExpansion e = contour_auto(P, -2, 2);
  ToeplitzResult t = toeplitz_reconstruct(P, 2, 2);
  for (int j = -2; j <= -1; ++j) {
    const double scale = std::max(1.0, e.coeff(j).norm());
    CHECK((t.exp.coeff(j) - e.coeff(j)).norm() / scale < 1e-7);
  }
}

TEST_CASE("annihilation check") {
  MatrixPolynomial P = MatrixPolynomial::from_var({0.5 * Mat::Ones(2, 2)});
  LaurentExpansion e = contour_coefficients(P, -1, 0, 0.1, 256);
  Mat P1(2, 2);
  P1 << 0.5, -0.5, -0.5, 0.5;
  CHECK(annihilation_check(P1, e).pass);

  // negative control: the identity does not annihilate a nonzero principal part
  CHECK_FALSE(annihilation_check(Mat::Identity(2, 2), e).pass);

  // scalar 1 - z: P_1 = 0 annihilates trivially
  LaurentExpansion s = contour_coefficients(scalar_poly({1, -1}), -1, 0, 0.1, 256);
  CHECK(annihilation_check(Mat::Zero(1, 1), s).pass);
}
