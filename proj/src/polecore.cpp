#include "unitroot/polecore.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "unitroot/errors.hpp"

namespace unitroot {

namespace {

// A^[m] per the closed forms; lower brackets and Theta matrices supplied by
// the caller.
Mat a_bracket_impl(const std::vector<Mat>& deriv, const Mat& Ap,
                   const std::vector<Mat>& lower,
                   const std::optional<Mat>& th1,
                   const std::optional<Mat>& th2, int m) {
  const Mat& A1 = deriv[1];
  switch (m) {
    case 1:
      return A1;
    case 2:
      return 0.5 * deriv[2] - A1 * Ap * A1;
    case 3: {
      if (!th1) throw SequencingError("A^[3] requires Theta_1 (chain must reach K_1)");
      const Mat& Ab2 = lower[1];
      Mat tilde = A1 * Ap * A1 * Ap * A1 + A1 * Ap * Ab2 + Ab2 * Ap * A1 +
                  Ab2 * (*th1) * Ab2;
      return deriv[3] / 6.0 - tilde;
    }
    case 4: {
      if (!th1 || !th2)
        throw SequencingError("A^[4] requires Theta_1 and Theta_2 (chain must reach K_2)");
      const Mat& Ab2 = lower[1];
      const Mat& Ab3 = lower[2];
      const Mat& Th1 = *th1;
      const Mat& Th2 = *th2;
      Mat A1Ap = A1 * Ap;
      Mat ApA1 = Ap * A1;
      Mat tilde = A1Ap * (0.5 * deriv[2]) * ApA1
                + A1Ap * (Ab2 * Th1 + A1Ap) * Ab2
                + A1Ap * Ab3
                + Ab2 * (ApA1 + Th1 * Ab2) * ApA1
                + Ab2 * (Ap + Th1 * Ab2 * Th1) * Ab2
                + Ab2 * Th1 * Ab3
                + Ab3 * ApA1
                + Ab3 * Th1 * Ab2
                + Ab3 * Th2 * Ab3;
      return deriv[4] / 24.0 - tilde;
    }
    default:
      throw UnsupportedOrderError("A^[m] supported for m = 1..4 only");
  }
}

struct SingularValues {
  double smin = 0.0;
  double smax = 0.0;
};

SingularValues extreme_singular_values(const Mat& M) {
  if (M.rows() == 0 || M.cols() == 0) return {};
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

}  // namespace

Mat PoleReport::c_chain(int i) const {
  Mat out = C0perp;
  for (int j = 1; j <= i; ++j) out = out * chain[static_cast<size_t>(j - 1)].Cperp;
  return out;
}

Mat PoleReport::b_chain(int i) const {
  Mat out = B0perp.transpose();
  for (int j = 1; j <= i; ++j)
    out = chain[static_cast<size_t>(j - 1)].Bperp.transpose() * out;
  return out;
}

PoleReport detect_pole_order(const MatrixPolynomial& P, const Tolerances& tol) {
  return detect_pole_order(P, tol, det_roots(P));
}

PoleReport detect_pole_order(const MatrixPolynomial& P, const Tolerances& tol,
                             const RootReport& roots) {
  PoleReport rep;
  rep.tol = tol;
  rep.mu = roots.unit_root_multiplicity;
  rep.premise_ok = roots.premise_ok;
  if (!roots.premise_ok)
    rep.warnings.push_back("roots of det A(z) other than z = 1 are not all outside the unit circle");

  const Index n = P.dim();
  rep.deriv.reserve(5);
  for (int k = 0; k <= 4; ++k) rep.deriv.push_back(P.derivative_at_one(k));
  rep.A = rep.deriv[0];
  double poly_scale = 0.0;
  for (int k = 0; k <= P.degree(); ++k)
    poly_scale = std::max(poly_scale, P.coeff(k).norm());
  const Tolerances tolA =
      anchored(tol, extreme_singular_values(rep.A).smax, poly_scale);
  rep.a_fact = rank_factorize(rep.A, tolA);

  if (rep.a_fact.r == n) {
    rep.m = 0;  // A(1) invertible: no unit-root pole
    rep.Apinv = pinv(rep.A, tolA);
    rep.B0perp = Mat::Zero(n, 0);
    rep.C0perp = Mat::Zero(n, 0);
    return rep;
  }
  if (rep.mu == 0)
    rep.warnings.push_back("A(1) is singular but det A(z) shows no unit root; tolerances may be inconsistent");

  rep.Apinv = pinv(rep.A, tolA);
  rep.B0perp = orth_complement(rep.a_fact.B, tol);
  rep.C0perp = orth_complement(rep.a_fact.C, tol);

  Mat bprod = rep.B0perp.transpose();  // B_{i-1 perp}' ... B_{0 perp}'
  Mat cprod = rep.C0perp;              // C_{0 perp} ... C_{i-1 perp}

  for (int i = 1; i <= 4; ++i) {
    rep.a_brackets.push_back(a_bracket_impl(rep.deriv, rep.Apinv,
                                            rep.a_brackets, rep.theta1,
                                            rep.theta2, i));
    ChainStep step;
    step.K = bprod * rep.a_brackets.back() * cprod;
    auto sv = extreme_singular_values(step.K);
    // a K_i that is pure roundoff at the scale of A^[i] -- or at the scale
    // of the polynomial itself, since A^[i] can be an exact zero (equal
    // Smith degrees make the lower derivatives vanish) -- must be treated as
    // exactly zero: the relative sigma test is blind to it (for a 1x1 noise
    // entry sigma_min == sigma_max) and its pseudoinverse would blow up
    const double ref = std::max(rep.a_brackets.back().norm(), poly_scale);
    if (step.K.size() > 0 && sv.smax <= tol.nonsing_rel * ref) {
      step.K.setZero();
      sv = {0.0, 0.0};
    }
    step.sigma_min = sv.smin;
    step.sigma_max = sv.smax;
    // empty K_i means the chain consumed all n dimensions: nonsingular
    step.nonsingular = step.K.rows() == 0 ||
                       sv.smin > tol.nonsing_rel * sv.smax;
    if (step.K.rows() > 0 && sv.smax > 0.0) {
      const double ratio = sv.smin / (tol.nonsing_rel * sv.smax);
      if (ratio > 0.1 && ratio < 10.0) {
        rep.ambiguous = true;
        rep.warnings.push_back("K_" + std::to_string(i) +
                               " is borderline singular at the configured tolerance");
      }
    }
    const Tolerances tolK = anchored(tol, sv.smax, ref);
    step.fact = rank_factorize(step.K, tolK);
    step.Bperp = orth_complement(step.fact.B, tol);
    step.Cperp = orth_complement(step.fact.C, tol);
    rep.chain.push_back(step);

    if (i == 1)
      rep.theta1 = rep.C0perp * pinv(step.K, tolK) * rep.B0perp.transpose();
    if (i == 2)
      rep.theta2 = cprod * pinv(step.K, tolK) * bprod;

    if (step.nonsingular) {
      rep.m = i;
      break;
    }
    bprod = step.Bperp.transpose() * bprod;
    cprod = cprod * step.Cperp;
  }

  if (rep.m == 0)
    throw UnsupportedOrderError("K_4 is singular: pole order exceeds the supported range m <= 4");
  if (rep.m > rep.mu)
    rep.warnings.push_back("detected m exceeds the unit-root multiplicity mu; model is numerically inconsistent");

  rep.n_leading = leading_matrix(rep);
  return rep;
}

Mat compute_theta(const PoleReport& rep, int which) {
  if (which != 1 && which != 2)
    throw InputError("compute_theta: which must be 1 or 2");
  if (rep.chain.size() < static_cast<size_t>(which))
    throw SequencingError("compute_theta: chain does not reach K_" + std::to_string(which));
  const ChainStep& step = rep.chain[static_cast<size_t>(which - 1)];
  double scale = rep.a_brackets[static_cast<size_t>(which - 1)].norm();
  for (const Mat& d : rep.deriv) scale = std::max(scale, d.norm());
  const Tolerances tolK = anchored(rep.tol, step.sigma_max, scale);
  return rep.c_chain(which - 1) * pinv(step.K, tolK) * rep.b_chain(which - 1);
}

Mat compute_a_bracket(const PoleReport& rep, int m) {
  if (m < 1 || m > 4)
    throw UnsupportedOrderError("compute_a_bracket: m must be in 1..4");
  return a_bracket_impl(rep.deriv, rep.Apinv, rep.a_brackets, rep.theta1,
                        rep.theta2, m);
}

Mat leading_matrix(const PoleReport& rep) {
  if (rep.m == 0)
    throw InputError("leading_matrix: A(1) is invertible, no pole at z = 1");
  const Mat& Km = rep.chain[static_cast<size_t>(rep.m - 1)].K;
  Mat Kinv = Km.rows() == 0 ? Km : Mat(Km.inverse());
  return rep.c_chain(rep.m - 1) * Kinv * rep.b_chain(rep.m - 1);
}

Mat lambda_theta(const PoleReport& rep, const std::vector<Mat>& principal,
                 int theta) {
  const int m = rep.m;
  if (theta < 1 || theta >= m)
    throw InputError("lambda_theta: theta must satisfy 1 <= theta < m");
  if (principal.size() != static_cast<size_t>(m))
    throw ShapeError("lambda_theta: principal must hold N_{-m}..N_{-1}");
  const Index n = rep.A.rows();
  const Mat& Ap = rep.Apinv;

  auto N = [&](int power) -> const Mat& {  // N_{power}, power in [-m, -1]
    return principal[static_cast<size_t>(power + m)];
  };

  Mat left = Mat::Zero(n, n);
  Mat right = Mat::Zero(n, n);
  double jfact = 1.0;
  for (int j = 1; j <= theta; ++j) {
    jfact *= j;
    const Mat Aj = rep.deriv[static_cast<size_t>(j)] / jfact;
    left += Aj * N(-m + theta - j);
    right += N(-m + theta - j) * Aj;
  }
  Mat mid = Mat::Zero(n, n);
  jfact = 1.0;
  for (int j = 1; j <= theta - 1; ++j) {
    jfact *= j;
    mid += N(-m + theta - j) * (rep.deriv[static_cast<size_t>(j)] / jfact);
  }
  return -Ap * left - right * Ap + Ap * rep.A * mid * Ap;
}

namespace {

// residuals of R against the subspace G * S * H for arbitrary S, with G and
// H the chain factors (G has orthonormal columns, H orthonormal rows).
DecompEntry space_residuals(const Mat& R, const Mat& G, const Mat& H,
                            int theta, int depth, const Tolerances& tol) {
  DecompEntry e;
  e.theta = theta;
  e.depth = depth;
  const Index n = R.rows();
  Mat left_ann = Mat::Identity(n, n) - G * pinv(G, tol);
  Mat right_ann = Mat::Identity(n, n) - pinv(H, tol) * H;
  e.left_residual = (left_ann * R).norm();
  e.right_residual = (R * right_ann).norm();
  return e;
}

}  // namespace

DecompositionReport decomposition_check(const PoleReport& rep,
                                        const std::vector<Mat>& principal) {
  DecompositionReport out;
  const int m = rep.m;
  if (m < 2) return out;

  double scale = 1.0;
  for (const Mat& N : principal) scale = std::max(scale, N.norm());
  out.scale = scale;

  auto N = [&](int power) -> const Mat& {
    return principal[static_cast<size_t>(power + m)];
  };

  for (int theta = 1; theta < m; ++theta) {
    Mat R = N(-m + theta) - lambda_theta(rep, principal, theta);
    out.entries.push_back(space_residuals(R, rep.C0perp, rep.b_chain(0),
                                          theta, 0, rep.tol));

    if (theta == 1 && m >= 3) {
      // strip the Theta_j convolution terms; the remainder sits in the
      // depth-(m-2) chain subspace
      Mat R1 = R;
      for (int j = 1; j <= m - 2; ++j) {
        const Mat& Th = j == 1 ? *rep.theta1 : *rep.theta2;
        const Mat& Ab = rep.a_brackets[static_cast<size_t>(j)];  // A^[j+1]
        R1 += Th * Ab * N(-m) + N(-m) * Ab * Th;
      }
      out.entries.push_back(space_residuals(R1, rep.c_chain(m - 2),
                                            rep.b_chain(m - 2), theta, 1,
                                            rep.tol));
    }
    if (theta == 2 && m == 4) {
      const Mat& Th1 = *rep.theta1;
      const Mat& Ap = rep.Apinv;
      const Mat& A1 = rep.deriv[1];
      const Mat& Ab2 = rep.a_brackets[1];
      const Mat& Ab3 = rep.a_brackets[2];
      const Mat& K1 = rep.chain[0].K;
      Mat k1_ann = Mat::Identity(K1.rows(), K1.rows()) - K1 * pinv(K1, rep.tol);
      Mat B0p = rep.b_chain(0);  // B_{0 perp}'
      Mat a3_breve = Ab3 + A1 * Ap * Ab2 + Ab2 * Th1 * Ab2;
      Mat a3_dot = Ab3 + Ab2 * Ap * A1 + Ab2 * Th1 * Ab2;
      Mat R2 = R
             + Th1 * Ab2 * N(-3) * B0p.transpose() * k1_ann * B0p
             + Th1 * a3_dot * N(-4)
             + rep.C0perp * rep.C0perp.transpose() * N(-3) * Ab2 * Th1
             + N(-4) * a3_breve * Th1;
      out.entries.push_back(space_residuals(R2, rep.c_chain(1), rep.b_chain(1),
                                            theta, 1, rep.tol));
    }
  }

  for (const auto& e : out.entries)
    out.max_residual = std::max(out.max_residual,
                                std::max(e.left_residual, e.right_residual) / scale);
  return out;
}

}  // namespace unitroot
