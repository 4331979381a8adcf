#pragma once

#include <vector>

#include "unitroot/matpoly.hpp"
#include "unitroot/numla.hpp"

namespace unitroot {

/// Laurent coefficients of A^{-1}(z) about z = 1 together with the quadrature
/// metadata that produced them. principal holds N_{-m}..N_{-1}; regular holds
/// N_0..N_q.
struct LaurentExpansion {
  int m = 0;
  std::vector<Mat> principal;
  std::vector<Mat> regular;
  double radius = 0.0;
  int nodes = 0;
  double imag_leak = 0.0;  ///< worst imaginary entry / coefficient scale

  int q() const { return static_cast<int>(regular.size()) - 1; }
  /// N_j for j in [-m, q].
  const Mat& coeff(int j) const;
};

/// Safe contour radius: min(0.1, half the distance from 1 to the nearest
/// other root of det A(z)).
double default_radius(const RootReport& roots);

/// Cauchy-formula trapezoid quadrature on |z - 1| = radius.
/// nodes must be a power of two >= 64. Throws ContourError when the contour
/// passes too close to a root of det A(z).
LaurentExpansion contour_coefficients(const MatrixPolynomial& P, int j_min,
                                      int j_max, double radius, int nodes);

/// contour_coefficients with automatic node doubling (256 -> 4096) until two
/// successive node counts agree to 1e-9 relative; throws ConvergenceError at
/// the cap. radius <= 0 selects default_radius for the principal part and a
/// wider (still root-free) contour for the nonnegative powers, whose
/// quadrature roundoff is otherwise amplified by radius^{-j}.
LaurentExpansion contour_auto(const MatrixPolynomial& P, int j_min, int j_max,
                              double radius = 0.0, int start_nodes = 256,
                              int max_nodes = 4096);

struct IdentityReport {
  std::vector<double> left_residuals;   ///< h = 0..m+q
  std::vector<double> right_residuals;
  double max_residual = 0.0;            ///< relative to scale
  double scale = 1.0;
  bool pass = false;
};

/// Check the convolution identities sum_j (1/j!) N_{h-m-j} A^(j) = delta_{h,m} I
/// (and the mirrored right-multiplied version) for h = 0..m+q.
IdentityReport verify_fundamental_identities(const LaurentExpansion& exp,
                                             const MatrixPolynomial& P,
                                             const Tolerances& tol = {});

struct ToeplitzResult {
  LaurentExpansion exp;
  double residual = 0.0;  ///< norm of the stacked-system residual
  Index rank = 0;         ///< numerical rank of the stacked system
  Index unknowns = 0;
};

/// Recover N_{-m}..N_q by solving the stacked convolution identities in the
/// least-squares sense (minimum-norm when rank deficient). Throws InputError
/// when the rank deficiency leaves the principal block undetermined.
ToeplitzResult toeplitz_reconstruct(const MatrixPolynomial& P, int m, int q,
                                    const Tolerances& tol = {});

struct AnnihilationVerdict {
  std::vector<double> residuals;  ///< ||P_m N_{-j}|| for j = 1..m
  double scale = 1.0;
  bool pass = false;
};

/// Testable form of "P_m A^{-1}(z) is analytic at z = 1": P_m must kill every
/// principal-part matrix.
AnnihilationVerdict annihilation_check(const Mat& P_m,
                                       const LaurentExpansion& exp,
                                       const Tolerances& tol = {});

}  // namespace unitroot
