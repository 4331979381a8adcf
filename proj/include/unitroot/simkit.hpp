#pragma once

#include <cstdint>
#include <vector>

#include "unitroot/matpoly.hpp"
#include "unitroot/numla.hpp"

namespace unitroot {

/// Recipe for a model with known pole order: A(z) = E(z) D(z) F(z) with
/// D = diag((1-z)^{d_i}) and E, F unimodular.
struct SmithSpec {
  Index n = 2;
  std::vector<int> degrees;      ///< d_1 >= d_2 >= ... >= d_n, each in 0..4
  std::uint64_t seed = 0;
  int unimodular_degree = 1;     ///< degree of the elementary-op polynomials
  int num_ops = 4;               ///< elementary operations per unimodular factor
};

struct SmithModel {
  MatrixPolynomial poly;
  int known_m = 0;
};

/// Random model with pole order exactly max(degrees) and no other roots on
/// or inside the unit circle.
SmithModel generate_smith_model(const SmithSpec& spec);

/// Rewrite A(z) with invertible A_0 as the VAR-form polynomial
/// A_0^{-1} A(z), so the leading coefficient becomes the identity.
MatrixPolynomial to_var_form(const MatrixPolynomial& P);

struct Trajectory {
  Index n = 0;
  Index T = 0;
  Mat values;        ///< T x n, rows are y_1..y_T
  Mat noise_cov;
  std::uint64_t seed = 0;
};

/// Iterate y_t = sum_k A_k y_{t-k} + eps_t with Gaussian noise of covariance
/// sigma (PSD) and zero pre-sample values. P must be in VAR form (A_0 = I).
Trajectory simulate_var(const MatrixPolynomial& P, Index T, const Mat& sigma,
                        std::uint64_t seed);

struct DiagnosticsReport {
  std::vector<double> slopes;      ///< log-variance growth slope of y, dy, ..., d^m y
  std::vector<bool> stationary;    ///< slope below threshold, per differencing order
  double projected_slope = 0.0;    ///< slope of P_m * y_t
  bool projected_stationary = false;
  double threshold = 0.3;
};

/// Variance-growth diagnostics over dyadic windows: the slope of
/// log(window variance) vs log(window length) should fall below the
/// threshold exactly at differencing order m, and immediately for P_m * y.
DiagnosticsReport integration_diagnostics(const Trajectory& traj, int m,
                                          const Mat& P_m,
                                          double threshold = 0.3);

}  // namespace unitroot
