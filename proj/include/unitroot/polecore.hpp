#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unitroot/matpoly.hpp"
#include "unitroot/numla.hpp"

namespace unitroot {

/// One step of the nonsingularity chain: K_i, its rank factorization
/// K_i = B_i C_i', and the orthogonal complements of the factors.
struct ChainStep {
  Mat K;
  RankFactorization fact;
  Mat Bperp;
  Mat Cperp;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool nonsingular = false;
};

/// Everything detect_pole_order establishes about A(z) at z = 1.
struct PoleReport {
  int m = 0;                  ///< pole order of A^{-1}(z), 0 when A(1) is invertible
  int mu = 0;                 ///< unit-root multiplicity of det A(z)
  bool premise_ok = false;    ///< non-unit roots all outside the unit circle
  bool ambiguous = false;     ///< a K_i sat near the nonsingularity threshold
  std::vector<std::string> warnings;

  Mat A;                      ///< A(1)
  Mat Apinv;                  ///< A(1)^+
  RankFactorization a_fact;   ///< A(1) = B_0 C_0'
  Mat B0perp;
  Mat C0perp;
  std::vector<Mat> deriv;     ///< A^(0)..A^(4), exact
  std::vector<ChainStep> chain;   ///< K_1..K_m (last one nonsingular)
  std::vector<Mat> a_brackets;    ///< A^[1]..A^[m]
  std::optional<Mat> theta1;
  std::optional<Mat> theta2;
  std::optional<Mat> n_leading;   ///< N_{-m}, absent when m = 0

  Tolerances tol;

  /// C_{0 perp} C_{1 perp} ... C_{i perp} (i = -1 gives the n x n identity
  /// restricted start, i.e. C_{0 perp} for i = 0).
  Mat c_chain(int i) const;
  /// B_{i perp}' ... B_{1 perp}' B_{0 perp}'.
  Mat b_chain(int i) const;
};

/// Build the K_1..K_4 chain and determine the pole order m (0..4).
/// Throws UnsupportedOrderError when K_4 is still singular.
PoleReport detect_pole_order(const MatrixPolynomial& P,
                             const Tolerances& tol = {});
PoleReport detect_pole_order(const MatrixPolynomial& P, const Tolerances& tol,
                             const RootReport& roots);

/// Theta_1 = C0p K1^+ B0p', Theta_2 = C0p C1p K2^+ B1p' B0p' recomputed from
/// the stored chain. which must be 1 or 2; throws SequencingError when the
/// chain does not reach K_which.
Mat compute_theta(const PoleReport& rep, int which);

/// A^[m] for m = 1..4, from the cached derivatives and Theta matrices.
Mat compute_a_bracket(const PoleReport& rep, int m);

/// Closed-form leading principal-part matrix
/// N_{-m} = (prod C_perp) K_m^{-1} (prod B_perp').
Mat leading_matrix(const PoleReport& rep);

/// Lambda_theta: the pole-order-independent part of N_{-m+theta}, built from
/// discrete convolutions of the derivatives with the higher principal-part
/// matrices. principal holds N_{-m}..N_{-1} in ascending power order.
Mat lambda_theta(const PoleReport& rep, const std::vector<Mat>& principal,
                 int theta);

struct DecompEntry {
  int theta = 0;
  int depth = 0;              ///< 0: C0p/B0p' space, 1: deeper chain space
  double left_residual = 0.0;
  double right_residual = 0.0;
};

struct DecompositionReport {
  std::vector<DecompEntry> entries;
  double max_residual = 0.0;
  double scale = 1.0;
};

/// Verify that each non-leading principal-part matrix decomposes as
/// Lambda_theta plus a term confined to the asserted chain subspace.
DecompositionReport decomposition_check(const PoleReport& rep,
                                        const std::vector<Mat>& principal);

}  // namespace unitroot
