#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "unitroot/coint.hpp"
#include "unitroot/errors.hpp"
#include "unitroot/polecore.hpp"
#include "unitroot/simkit.hpp"

using namespace unitroot;

TEST_CASE("trivial unimodular factors reproduce the diagonal core") {
  SmithSpec spec;
  spec.n = 2;
  spec.degrees = {1, 0};
  spec.num_ops = 0;
  SmithModel model = generate_smith_model(spec);
  CHECK(model.known_m == 1);
  CHECK(model.poly.degree() == 1);
  Mat A0 = Mat::Identity(2, 2), A1 = Mat::Zero(2, 2);
  A1(0, 0) = -1.0;
  CHECK((model.poly.coeff(0) - A0).norm() == 0.0);
  CHECK((model.poly.coeff(1) - A1).norm() == 0.0);
}

TEST_CASE("all-zero degrees give a stationary model") {
  SmithSpec spec;
  spec.n = 2;
  spec.degrees = {0, 0};
  spec.seed = 5;
  SmithModel model = generate_smith_model(spec);
  CHECK(model.known_m == 0);
  PoleReport rep = detect_pole_order(model.poly);
  CHECK(rep.m == 0);
}

TEST_CASE("generated models have the advertised pole order") {
  for (int d = 1; d <= 4; ++d) {
    SmithSpec spec;
    spec.n = 3;
    spec.degrees = {d, 1, 0};
    if (d == 1) spec.degrees = {1, 0, 0};
    spec.seed = 100 + static_cast<std::uint64_t>(d);
    SmithModel model = generate_smith_model(spec);
    CHECK(model.known_m == d);
    CHECK(detect_pole_order(model.poly).m == d);
  }
}

TEST_CASE("spec validation") {
  SmithSpec bad;
  bad.n = 2;
  bad.degrees = {1};  // wrong length
  CHECK_THROWS_AS(generate_smith_model(bad), InputError);
  bad.degrees = {5, 0};  // degree out of range
  CHECK_THROWS_AS(generate_smith_model(bad), InputError);
  bad.degrees = {0, 1};  // not non-increasing
  CHECK_THROWS_AS(generate_smith_model(bad), InputError);
  bad.degrees = {1, 0};
  bad.num_ops = -1;
  CHECK_THROWS_AS(generate_smith_model(bad), InputError);
}

TEST_CASE("to_var_form normalizes the leading coefficient") {
  Mat A0(2, 2), A1(2, 2);
  A0 << 2, 0, 1, 1;
  A1 << -2, 0, -1, -1;
  MatrixPolynomial P({A0, A1});
  MatrixPolynomial V = to_var_form(P);
  CHECK((V.coeff(0) - Mat::Identity(2, 2)).norm() < 1e-14);
  // same inverse behaviour: A_0^{-1} A(z) has the same roots
  CHECK((V.coeff(1) + Mat::Identity(2, 2)).norm() < 1e-14);

  Mat S0 = Mat::Zero(2, 2);  // singular leading coefficient is rejected
  CHECK_THROWS_AS(to_var_form(MatrixPolynomial({S0, A1})), InputError);
}

TEST_CASE("simulation is reproducible and respects degenerate noise") {
  MatrixPolynomial P = MatrixPolynomial::from_var({0.5 * Mat::Ones(2, 2)});
  Mat sigma = Mat::Identity(2, 2);
  Trajectory a = simulate_var(P, 200, sigma, 42);
  Trajectory b = simulate_var(P, 200, sigma, 42);
  CHECK((a.values - b.values).norm() == 0.0);
  Trajectory c = simulate_var(P, 200, sigma, 43);
  CHECK((a.values - c.values).norm() > 0.0);

  // zero covariance and zero pre-sample values: identically zero path
  Trajectory z = simulate_var(P, 100, Mat::Zero(2, 2), 1);
  CHECK(z.values.norm() == 0.0);

  Mat bad(2, 2);
  bad << 1, 2, 2, 1;  // indefinite
  CHECK_THROWS_AS(simulate_var(P, 100, bad, 1), InputError);
}

TEST_CASE("random walk variance grows, AR(1) variance does not") {
  // y_t = y_{t-1} + eps
  MatrixPolynomial rw = MatrixPolynomial::from_var({Mat::Identity(1, 1)});
  Trajectory t = simulate_var(rw, 4000, Mat::Identity(1, 1), 7);
  DiagnosticsReport d = integration_diagnostics(t, 1, Mat::Zero(1, 1));
  REQUIRE(d.slopes.size() == 2);
  CHECK(d.slopes[0] > 0.3);   // level is integrated
  CHECK(d.stationary[1]);     // first difference is white noise

  MatrixPolynomial ar = MatrixPolynomial::from_var({0.5 * Mat::Identity(1, 1)});
  Trajectory s = simulate_var(ar, 4000, Mat::Identity(1, 1), 7);
  DiagnosticsReport e = integration_diagnostics(s, 0, Mat::Identity(1, 1));
  CHECK(e.stationary[0]);
  CHECK(e.projected_stationary);
}

TEST_CASE("cointegrated pair: projected combination is stationary") {
  MatrixPolynomial P = MatrixPolynomial::from_var({0.5 * Mat::Ones(2, 2)});
  PoleReport rep = detect_pole_order(P);
  CointegrationResult coint = compute_P(rep, PiSet{});
  Trajectory t = simulate_var(P, 4000, Mat::Identity(2, 2), 11);
  DiagnosticsReport d = integration_diagnostics(t, 1, coint.P);
  CHECK_FALSE(d.stationary[0]);     // levels drift
  CHECK(d.stationary[1]);           // differences are stationary
  CHECK(d.projected_stationary);    // y_1 - y_2 is stationary
}
