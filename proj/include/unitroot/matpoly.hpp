#pragma once

#include <complex>
#include <vector>

#include "unitroot/numla.hpp"

namespace unitroot {

using Complex = std::complex<double>;

/// Real square matrix polynomial A(z) = sum_k A_k z^k.
/// Immutable after construction; all operations are pure.
class MatrixPolynomial {
 public:
  /// Build from the explicit coefficient list A_0..A_K.
  explicit MatrixPolynomial(std::vector<Mat> coeffs);

  /// Build the VAR characteristic polynomial A(z) = I - sum_k A_k z^k from
  /// the lag matrices A_1..A_K.
  static MatrixPolynomial from_var(const std::vector<Mat>& lag_matrices);

  Index dim() const { return dim_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Mat& coeff(int k) const { return coeffs_[static_cast<size_t>(k)]; }
  const std::vector<Mat>& coeffs() const { return coeffs_; }

  /// Horner evaluation of A(z).
  CMat evaluate(Complex z) const;
  Mat evaluate_real(double z) const;

  /// k-th derivative at z = 1, exact from the coefficients.
  /// Returns the zero matrix for k > degree.
  Mat derivative_at_one(int k) const;

  /// Taylor coefficients (1/k!) A^(k) about z = 1, k = 0..K.
  std::vector<Mat> taylor_coeffs_at_one() const;

 private:
  Index dim_;
  std::vector<Mat> coeffs_;
};

/// Determinantal-root survey of det A(z) = 0.
struct RootReport {
  std::vector<Complex> roots;           ///< cluster centers (unit root first when present)
  std::vector<int> multiplicities;      ///< cluster multiplicities, parallel to roots
  int unit_root_multiplicity = 0;       ///< mu
  bool premise_ok = false;              ///< all non-unit roots outside |z| = 1 + margin
  double min_outside_modulus = 0.0;     ///< smallest non-unit root modulus (inf when none)
  bool companion_warning = false;       ///< companion eigenproblem flagged as ill-conditioned
};

/// All finite roots of det A(z) with multiplicities. The unit-root
/// multiplicity mu is taken from the Taylor coefficients of det A(z) at z = 1
/// (robust for repeated roots); remaining roots are clustered within
/// cluster_tol.
RootReport det_roots(const MatrixPolynomial& P, double cluster_tol = 1e-6,
                     double outside_margin = 1e-6);

}  // namespace unitroot
