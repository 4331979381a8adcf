#pragma once

#include <Eigen/Dense>

namespace unitroot {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Shared tolerance knobs for every rank decision in the pipeline.
struct Tolerances {
  double rank_rel = 1e-10;    ///< relative singular-value cutoff
  double nonsing_rel = 1e-8;  ///< nonsingularity threshold for the K_i chain
  double residual_abs = 1e-9; ///< ceiling for verification residuals
};

/// M = B * C^T with B, C of full column rank r.
struct RankFactorization {
  Mat B;
  Mat C;
  Index r = 0;
};

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rank_rel * sigma_max are treated as zero. pinv of a p x 0 matrix is the
/// 0 x p matrix.
Mat pinv(const Mat& M, const Tolerances& tol = {});

/// Count of singular values above rank_rel * sigma_max. Empty matrices have
/// rank 0.
Index numerical_rank(const Mat& M, const Tolerances& tol = {});

/// Symmetric-split rank factorization B = U_r S_r^{1/2}, C = V_r S_r^{1/2}.
RankFactorization rank_factorize(const Mat& M, const Tolerances& tol = {});

/// Orthonormal-column basis of the orthogonal complement of range(M).
/// An n x 0 input yields the n x n identity.
Mat orth_complement(const Mat& M, const Tolerances& tol = {});

/// Orthonormal basis of range(M).
Mat range_basis(const Mat& M, const Tolerances& tol = {});

/// Largest singular value (0 for empty matrices).
double sigma_max(const Mat& M);

/// Tolerance set whose rank cutoff is anchored to an external scale:
/// singular values below rank_rel * max(smax, ref) count as zero. Guards
/// rank decisions on derived matrices that may consist of pure roundoff,
/// where a cutoff relative to their own smax is blind.
Tolerances anchored(const Tolerances& tol, double smax, double ref);

/// G^T-annihilator: I - G G^+ (kills the columns of G on the left).
Mat ann_row(const Mat& G, const Tolerances& tol = {});

/// A-perp annihilator: I - A^+ A (kills the rows of A on the right).
Mat ann_col(const Mat& A, const Tolerances& tol = {});

}  // namespace unitroot
