#include "unitroot/numla.hpp"

#include <Eigen/SVD>

#include "unitroot/errors.hpp"

namespace unitroot {

namespace {

bool is_empty(const Mat& M) { return M.rows() == 0 || M.cols() == 0; }

Eigen::JacobiSVD<Mat> svd_of(const Mat& M, unsigned options) {
  return Eigen::JacobiSVD<Mat>(M, options);
}

Index rank_from_singular_values(const Vec& s, double rank_rel) {
  if (s.size() == 0) return 0;
  const double cutoff = rank_rel * s(0);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) ++r;
  return r;
}

}  // namespace

Mat pinv(const Mat& M, const Tolerances& tol) {
  if (is_empty(M)) return Mat::Zero(M.cols(), M.rows());
  auto svd = svd_of(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  const double cutoff = tol.rank_rel * s(0);
  Vec sinv = Vec::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) sinv(i) = 1.0 / s(i);
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

Index numerical_rank(const Mat& M, const Tolerances& tol) {
  if (is_empty(M)) return 0;
  auto svd = svd_of(M, 0);
  return rank_from_singular_values(svd.singularValues(), tol.rank_rel);
}

RankFactorization rank_factorize(const Mat& M, const Tolerances& tol) {
  if (M.rows() != M.cols())
    throw ShapeError("rank_factorize: square input required");
  RankFactorization f;
  if (is_empty(M)) {
    f.B = Mat::Zero(M.rows(), 0);
    f.C = Mat::Zero(M.rows(), 0);
    return f;
  }
  auto svd = svd_of(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  f.r = rank_from_singular_values(s, tol.rank_rel);
  Vec sqrt_s = s.head(f.r).cwiseSqrt();
  f.B = svd.matrixU().leftCols(f.r) * sqrt_s.asDiagonal();
  f.C = svd.matrixV().leftCols(f.r) * sqrt_s.asDiagonal();
  return f;
}

Mat orth_complement(const Mat& M, const Tolerances& tol) {
  const Index n = M.rows();
  if (is_empty(M)) return Mat::Identity(n, n);
  auto svd = svd_of(M, Eigen::ComputeFullU);
  const Index r = rank_from_singular_values(svd.singularValues(), tol.rank_rel);
  return svd.matrixU().rightCols(n - r);
}

Mat range_basis(const Mat& M, const Tolerances& tol) {
  if (is_empty(M)) return Mat::Zero(M.rows(), 0);
  auto svd = svd_of(M, Eigen::ComputeFullU);
  const Index r = rank_from_singular_values(svd.singularValues(), tol.rank_rel);
  return svd.matrixU().leftCols(r);
}

double sigma_max(const Mat& M) {
  if (is_empty(M)) return 0.0;
  return svd_of(M, 0).singularValues()(0);
}

Tolerances anchored(const Tolerances& tol, double smax, double ref) {
  Tolerances t = tol;
  if (smax > 0.0 && ref > smax) t.rank_rel = tol.rank_rel * ref / smax;
  return t;
}

Mat ann_row(const Mat& G, const Tolerances& tol) {
  const Index n = G.rows();
  if (is_empty(G)) return Mat::Identity(n, n);
  return Mat::Identity(n, n) - G * pinv(G, tol);
}

Mat ann_col(const Mat& A, const Tolerances& tol) {
  const Index n = A.cols();
  if (is_empty(A)) return Mat::Identity(n, n);
  return Mat::Identity(n, n) - pinv(A, tol) * A;
}

}  // namespace unitroot
