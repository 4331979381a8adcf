#include "unitroot/coint.hpp"

#include <algorithm>
#include <Eigen/SVD>

#include "unitroot/errors.hpp"
#include "unitroot/parsum.hpp"

namespace unitroot {

namespace {

Mat hcat(const Mat& X, const Mat& Y) {
  Mat out(X.rows(), X.cols() + Y.cols());
  out << X, Y;
  return out;
}

Mat projector_p1(const PoleReport& rep, const Tolerances& tol) {
  const Mat Ct = rep.a_fact.C.transpose();
  return pinv(Ct, tol) * Ct;
}

// rank of an (already verified) idempotent: its singular values sit at 0 or
// >= 1, so a relative SVD cutoff misfires on a near-zero projector
long projector_rank(const Mat& P) {
  Eigen::JacobiSVD<Mat> svd(P);
  long r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 0.5) ++r;
  return r;
}

// orthonormal range basis of a (verified) idempotent, thresholded the same
// way as projector_rank
Mat projector_range(const Mat& P) {
  Eigen::JacobiSVD<Mat> svd(P, Eigen::ComputeThinU);
  Index r = 0;
  for (Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 0.5) ++r;
  return svd.matrixU().leftCols(r);
}

// The Pi ingredients A^+ A^[j] (chain of C_perp) can be numerically zero;
// anchor every rank decision on them to the scale of the factors so roundoff
// never passes for signal.
Mat anchored_ann_row(const Mat& M, double ref, const Tolerances& tol) {
  return ann_row(M, anchored(tol, sigma_max(M), ref));
}

long anchored_rank(const Mat& M, double ref, const Tolerances& tol) {
  return static_cast<long>(
      numerical_rank(M, anchored(tol, sigma_max(M), ref)));
}

// Reference scale for an ingredient built from A^+ and the bracket A^[j].
// The bracket norm alone is not a safe anchor: A^[j] can itself be an exact
// zero, leaving its norm at roundoff level, so fall back to the scale of the
// derivatives the bracket is built from.
double ingredient_ref(const PoleReport& report, const Mat& bracket) {
  double dscale = bracket.norm();
  for (const Mat& d : report.deriv) dscale = std::max(dscale, d.norm());
  return report.Apinv.norm() * dscale;
}

}  // namespace

PiSet compute_pi(const PoleReport& report, const Tolerances& tol) {
  if (report.m < 2)
    throw InputError("compute_pi: no Pi projectors are defined for m < 2");
  const Mat& Ap = report.Apinv;
  const Mat& A1 = report.deriv[1];
  PiSet pis;
  switch (report.m) {
    case 2:
      pis.pi2 = anchored_ann_row(Ap * A1 * report.c_chain(1),
                                 ingredient_ref(report, A1), tol);
      break;
    case 3: {
      Mat t1 = anchored_ann_row(Ap * A1 * report.c_chain(0),
                                ingredient_ref(report, A1), tol);
      Mat t2 = anchored_ann_row(Ap * report.a_brackets[1] * report.c_chain(2),
                                ingredient_ref(report, report.a_brackets[1]),
                                tol);
      pis.pi3 = 2.0 * parallel_sum(t1, t2, tol);
      break;
    }
    case 4: {
      Mat t1 = anchored_ann_row(Ap * A1 * report.c_chain(0),
                                ingredient_ref(report, A1), tol);
      Mat t2 = anchored_ann_row(Ap * report.a_brackets[1] * report.c_chain(0),
                                ingredient_ref(report, report.a_brackets[1]),
                                tol);
      pis.pi34 = 2.0 * parallel_sum(t1, t2, tol);
      Mat t3 = anchored_ann_row(Ap * report.a_brackets[2] * report.c_chain(3),
                                ingredient_ref(report, report.a_brackets[2]),
                                tol);
      pis.pi4 = 2.0 * parallel_sum(*pis.pi34, t3, tol);
      break;
    }
    default:
      throw UnsupportedOrderError("compute_pi: m must be in 2..4");
  }
  return pis;
}

long coint_rank(const PoleReport& report, const PiSet& pis,
                std::vector<long>& terms, const Tolerances& tol) {
  terms.clear();
  const long rC0 = static_cast<long>(report.a_fact.r);
  const Mat& Ap = report.Apinv;
  const Mat& A1 = report.deriv[1];
  switch (report.m) {
    case 0:
      terms.push_back(static_cast<long>(report.A.rows()));
      return terms.back();
    case 1:
      terms.push_back(rC0);
      return rC0;
    case 2: {
      const long r2 = anchored_rank(Ap * A1 * report.c_chain(1),
                                    ingredient_ref(report, A1), tol);
      terms = {rC0, r2};
      return rC0 - r2;
    }
    case 3: {
      Mat stack = hcat(Ap * A1 * report.c_chain(0),
                       Ap * report.a_brackets[1] * report.c_chain(2));
      const long rs =
          anchored_rank(stack, ingredient_ref(report, report.a_brackets[1]),
                        tol);
      terms = {rC0, rs};
      return rC0 - rs;
    }
    case 4: {
      if (!pis.pi34)
        throw SequencingError("coint_rank: Pi_{3,4} required for m = 4");
      Mat stack = hcat(Ap * A1 * report.c_chain(0),
                       Ap * report.a_brackets[1] * report.c_chain(0));
      const long rs =
          anchored_rank(stack, ingredient_ref(report, report.a_brackets[1]),
                        tol);
      const double ref3 = ingredient_ref(report, report.a_brackets[2]);
      Mat inner_arg = Ap * report.a_brackets[2] * report.c_chain(3);
      Mat gamma = projector_range(*pis.pi34);
      Mat xi = projector_range(anchored_ann_row(inner_arg, ref3, tol));
      const long rxi = static_cast<long>(xi.cols());
      // r([Xi, Gamma]) = r(Xi) + rank of Gamma's component inside
      // range(inner_arg); measuring that component through inner_arg' keeps
      // the decision anchored to the ingredient scale instead of the
      // error-prone near-null directions of Xi itself
      const long rjoint =
          rxi + anchored_rank(inner_arg.transpose() * gamma, ref3, tol);
      terms = {rC0, rs, rxi, rjoint};
      return rC0 - rs + rxi - rjoint;
    }
    default:
      throw UnsupportedOrderError("coint_rank: m must be in 0..4");
  }
}

CointegrationResult compute_P(const PoleReport& report, const PiSet& pis,
                              const Tolerances& tol) {
  CointegrationResult res;
  res.m = report.m;
  const Index n = report.A.rows();

  if (report.m == 0) {
    res.P = Mat::Identity(n, n);
    res.stationary = true;
    res.rank = static_cast<long>(n);
    res.rank_closed_form = res.rank;
    res.rank_formula_terms = {res.rank};
    res.consistent = true;
    return res;
  }

  const Mat P1 = projector_p1(report, tol);
  if (report.m == 1) {
    res.P = P1;
  } else {
    const Mat* pi = nullptr;
    if (report.m == 2) pi = pis.pi2 ? &*pis.pi2 : nullptr;
    if (report.m == 3) pi = pis.pi3 ? &*pis.pi3 : nullptr;
    if (report.m == 4) pi = pis.pi4 ? &*pis.pi4 : nullptr;
    if (!pi)
      throw SequencingError("compute_P: PiSet lacks the projector for this m");
    // bordered evaluation of 2(P1 : Pi); direct product kept as cross-check
    Mat direct = 2.0 * parallel_sum(P1, *pi, tol);
    Mat bordered = bordered_parallel_sum(2.0 * P1, 2.0 * (*pi), tol);
    res.bordered_mismatch = (bordered - direct).norm();
    res.P = bordered;
  }

  res.pis = pis;
  res.idempotency = idempotency_residual(res.P);
  res.rank = projector_rank(res.P);
  res.rank_closed_form = coint_rank(report, pis, res.rank_formula_terms, tol);
  res.consistent = res.rank == res.rank_closed_form;
  return res;
}

}  // namespace unitroot
