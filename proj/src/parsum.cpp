#include "unitroot/parsum.hpp"

#include "unitroot/errors.hpp"

namespace unitroot {

double idempotency_residual(const Mat& P) { return (P * P - P).norm(); }

Mat parallel_sum(const Mat& X, const Mat& Z, const Tolerances& tol) {
  if (X.rows() != Z.rows() || X.cols() != Z.cols() || X.rows() != X.cols())
    throw ShapeError("parallel_sum: square matrices of equal size required");
  return X * pinv(X + Z, tol) * Z;
}

Mat combined_projector(const Mat& P_R, const Mat& P_S, const Tolerances& tol) {
  if (idempotency_residual(P_R) > tol.residual_abs ||
      idempotency_residual(P_S) > tol.residual_abs)
    throw InputError("combined_projector: inputs must be idempotent");
  return 2.0 * parallel_sum(P_R, P_S, tol);
}

Mat bordered_parallel_sum(const Mat& A, const Mat& B, const Tolerances& tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    throw ShapeError("bordered_parallel_sum: square matrices of equal size required");
  const Index n = A.rows();
  Mat M = Mat::Zero(3 * n, 3 * n);
  const Mat I = Mat::Identity(n, n);
  M.block(0, 0, n, n) = A;
  M.block(n, n, n, n) = B;
  M.block(0, 2 * n, n, n) = I;
  M.block(n, 2 * n, n, n) = I;
  M.block(2 * n, 0, n, n) = I;
  M.block(2 * n, n, n, n) = I;
  Mat Mp = pinv(M, tol);
  return -Mp.block(2 * n, 2 * n, n, n);
}

long parsum_rank(const Mat& A, const Mat& B, const Tolerances& tol) {
  return static_cast<long>(numerical_rank(A, tol)) +
         static_cast<long>(numerical_rank(B, tol)) -
         static_cast<long>(numerical_rank(A + B, tol));
}

}  // namespace unitroot
