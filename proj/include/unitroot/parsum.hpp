#pragma once

#include "unitroot/numla.hpp"

namespace unitroot {

/// Parallel sum X : Z = X (X + Z)^+ Z.
Mat parallel_sum(const Mat& X, const Mat& Z, const Tolerances& tol = {});

/// Combined projector 2(P_R : P_S) for a pair of idempotents. Throws
/// InputError when either argument fails the idempotency check.
Mat combined_projector(const Mat& P_R, const Mat& P_S,
                       const Tolerances& tol = {});

/// Parallel sum evaluated through the 3n x 3n bordered matrix
/// -[0 0 I] [[A 0 I],[0 B I],[I I 0]]^+ [0;0;I].
Mat bordered_parallel_sum(const Mat& A, const Mat& B,
                          const Tolerances& tol = {});

/// Rank of the parallel sum of two idempotents: r(A) + r(B) - r(A + B).
long parsum_rank(const Mat& A, const Mat& B, const Tolerances& tol = {});

/// Idempotency drift ||P^2 - P||_F.
double idempotency_residual(const Mat& P);

}  // namespace unitroot
