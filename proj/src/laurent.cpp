#include "unitroot/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "unitroot/errors.hpp"

namespace unitroot {

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

// raw coefficients N_{j_min}..N_{j_max} plus the imaginary roundoff observed
struct RawContour {
  std::vector<Mat> coeffs;
  double imag_abs = 0.0;     // worst imaginary entry across coefficients
  double coeff_scale = 1.0;  // largest coefficient norm (floored at 1)
};

// The quadrature runs in extended precision and in the (z-1) Taylor basis.
// Both matter: near the unit root A(z) is ill-conditioned like radius^{-m},
// so monomial-basis evaluation cancels catastrophically and double-precision
// solves leave noise far above the acceptance tolerances.
using LD = long double;
using CLD = std::complex<LD>;
using CMatL = Eigen::Matrix<CLD, Eigen::Dynamic, Eigen::Dynamic>;

RawContour contour_raw(const MatrixPolynomial& P, int j_min, int j_max,
                       double radius, int nodes) {
  const Index n = P.dim();
  const int count = j_max - j_min + 1;
  // compensated (Kahan) accumulation: the real parts of the node terms are
  // orders larger than the imaginary cancellation we need to preserve, so a
  // plain running sum would grow roundoff with the node count
  std::vector<CMatL> acc(static_cast<size_t>(count), CMatL::Zero(n, n));
  std::vector<CMatL> comp(static_cast<size_t>(count), CMatL::Zero(n, n));

  std::vector<CMatL> taylor;
  LD poly_scale = 0.0L;
  for (const Mat& T : P.taylor_coeffs_at_one()) {
    taylor.push_back(T.cast<CLD>());
    poly_scale = std::max(poly_scale, static_cast<LD>(T.norm()));
  }

  const LD rho = static_cast<LD>(radius);
  const LD two_pi = 2.0L * std::numbers::pi_v<LD>;
  for (int k = 0; k < nodes; ++k) {
    const LD th = two_pi * k / nodes;
    const CLD w = rho * CLD(std::cos(th), std::sin(th));  // z - 1 on contour
    CMatL Az = taylor.back();
    for (size_t i = taylor.size() - 1; i-- > 0;) Az = Az * w + taylor[i];
    Eigen::PartialPivLU<CMatL> lu(Az);
    const CMatL inv = lu.inverse();
    // anchor the conditioning guard to the coefficient scale, not Az itself:
    // for a 1 x 1 matrix ||A|| * ||A^{-1}|| is identically 1
    if (!inv.allFinite() || inv.norm() * poly_scale > 1e15L)
      throw ContourError(
          "contour passes too close to a root of det A(z); reduce the radius");
    for (int j = j_min; j <= j_max; ++j) {
      const LD ph = -j * th;
      const size_t idx = static_cast<size_t>(j - j_min);
      const CMatL term = inv * CLD(std::cos(ph), std::sin(ph));
      const CMatL y = term - comp[idx];
      const CMatL t = acc[idx] + y;
      comp[idx] = (t - acc[idx]) - y;
      acc[idx] = t;
    }
  }

  RawContour out;
  out.coeffs.reserve(static_cast<size_t>(count));
  for (int j = j_min; j <= j_max; ++j) {
    CMatL c = acc[static_cast<size_t>(j - j_min)] *
              (std::pow(rho, static_cast<LD>(-j)) / nodes);
    out.imag_abs = std::max(
        out.imag_abs, static_cast<double>(c.imag().cwiseAbs().maxCoeff()));
    out.coeffs.push_back(c.real().cast<double>());
    out.coeff_scale = std::max(out.coeff_scale, out.coeffs.back().norm());
  }
  return out;
}

// the leak diagnostic is relative: large principal coefficients carry
// proportionally larger roundoff in their imaginary parts
double relative_leak(const RawContour& raw) {
  return raw.imag_abs / raw.coeff_scale;
}

LaurentExpansion pack(std::vector<Mat> coeffs, int j_min, double radius,
                      int nodes, double imag_leak) {
  // pole order from the coefficient floor: largest j with a non-negligible
  // N_{-j}; authoritative m comes from the chain analysis, this is advisory
  double cmax = 0.0;
  for (const Mat& c : coeffs) cmax = std::max(cmax, c.norm());
  const double floor_norm = 1e-6 * cmax;

  LaurentExpansion exp;
  exp.radius = radius;
  exp.nodes = nodes;
  exp.imag_leak = imag_leak;
  int m = 0;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    const int j = j_min + static_cast<int>(i);
    if (j < 0 && coeffs[i].norm() > floor_norm) m = std::max(m, -j);
  }
  exp.m = m;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    const int j = j_min + static_cast<int>(i);
    if (j < -m) continue;  // below the detected pole order: numerically zero
    if (j < 0)
      exp.principal.push_back(std::move(coeffs[i]));
    else
      exp.regular.push_back(std::move(coeffs[i]));
  }
  return exp;
}

}  // namespace

const Mat& LaurentExpansion::coeff(int j) const {
  if (j < -m || j > q())
    throw InputError("LaurentExpansion::coeff: index " + std::to_string(j) +
                     " outside stored range");
  if (j < 0) return principal[static_cast<size_t>(j + m)];
  return regular[static_cast<size_t>(j)];
}

double default_radius(const RootReport& roots) {
  double dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < roots.roots.size(); ++i) {
    const double d = std::abs(roots.roots[i] - Complex(1.0, 0.0));
    if (d > 1e-9) dist = std::min(dist, d);
  }
  return std::min(0.1, 0.5 * dist);
}

LaurentExpansion contour_coefficients(const MatrixPolynomial& P, int j_min,
                                      int j_max, double radius, int nodes) {
  if (j_min > j_max) throw InputError("contour_coefficients: j_min > j_max");
  if (!(radius > 0.0))
    throw InputError("contour_coefficients: radius must be positive");
  if (nodes < 64 || !is_pow2(nodes))
    throw InputError("contour_coefficients: nodes must be a power of two >= 64");
  RawContour raw = contour_raw(P, j_min, j_max, radius, nodes);
  return pack(std::move(raw.coeffs), j_min, radius, nodes, relative_leak(raw));
}

LaurentExpansion contour_auto(const MatrixPolynomial& P, int j_min, int j_max,
                              double radius, int start_nodes, int max_nodes) {
  if (start_nodes < 64 || !is_pow2(start_nodes) || !is_pow2(max_nodes))
    throw InputError("contour_auto: node counts must be powers of two >= 64");

  // In auto mode the nonnegative powers are integrated on a wider contour.
  // The coefficients themselves are radius-invariant inside the nearest-root
  // disc, but the quadrature roundoff in N_j grows like radius^{-2m-j}, so
  // keeping the tight default radius for j >= 0 buries the (often tiny)
  // regular coefficients in amplified noise. An explicit caller radius is
  // honored for every power.
  double reg_radius = radius;
  if (radius <= 0.0) {
    const RootReport roots = det_roots(P);
    radius = default_radius(roots);
    double dist = std::numeric_limits<double>::infinity();
    for (const Complex& r : roots.roots) {
      const double d = std::abs(r - Complex(1.0, 0.0));
      if (d > 1e-9) dist = std::min(dist, d);
    }
    reg_radius = std::min(0.4, 0.5 * dist);
  }

  auto run = [&](int nodes) {
    if (j_max < 0 || radius == reg_radius)
      return contour_raw(P, j_min, j_max, radius, nodes);
    if (j_min >= 0) return contour_raw(P, j_min, j_max, reg_radius, nodes);
    RawContour prin = contour_raw(P, j_min, -1, radius, nodes);
    RawContour reg = contour_raw(P, 0, j_max, reg_radius, nodes);
    prin.coeffs.insert(prin.coeffs.end(),
                       std::make_move_iterator(reg.coeffs.begin()),
                       std::make_move_iterator(reg.coeffs.end()));
    prin.imag_abs = std::max(prin.imag_abs, reg.imag_abs);
    prin.coeff_scale = std::max(prin.coeff_scale, reg.coeff_scale);
    return prin;
  };

  RawContour prev = run(start_nodes);
  for (int nodes = start_nodes * 2; nodes <= max_nodes; nodes *= 2) {
    RawContour next = run(nodes);
    double scale = 1.0;
    for (const Mat& c : next.coeffs) scale = std::max(scale, c.norm());
    double change = 0.0;
    for (size_t i = 0; i < next.coeffs.size(); ++i)
      change = std::max(change, (next.coeffs[i] - prev.coeffs[i]).norm());
    prev = std::move(next);
    if (change < 1e-9 * scale)
      return pack(std::move(prev.coeffs), j_min, radius, nodes,
                  relative_leak(prev));
  }
  throw ConvergenceError(
      "contour_auto: coefficients did not stabilize at the node-count cap");
}

IdentityReport verify_fundamental_identities(const LaurentExpansion& exp,
                                             const MatrixPolynomial& P,
                                             const Tolerances& tol) {
  const Index n = P.dim();
  const int m = exp.m;
  const int q = exp.q();
  if (q < 0)
    throw InputError("verify_fundamental_identities: no regular coefficients");

  double scale = std::max(1.0, P.derivative_at_one(0).norm());
  for (const Mat& c : exp.principal) scale = std::max(scale, c.norm());
  for (const Mat& c : exp.regular) scale = std::max(scale, c.norm());

  IdentityReport rep;
  rep.scale = scale;
  const Mat I = Mat::Identity(n, n);
  for (int h = 0; h <= m + q; ++h) {
    Mat left = Mat::Zero(n, n);
    Mat right = Mat::Zero(n, n);
    double jfact = 1.0;
    for (int j = 0; j <= h; ++j) {
      if (j > 0) jfact *= j;
      const Mat Aj = P.derivative_at_one(j) / jfact;
      const Mat& N = exp.coeff(h - m - j);
      left += N * Aj;   // N-weighted on the left of the product order below
      right += Aj * N;
    }
    const Mat target = h == m ? I : Mat(Mat::Zero(n, n));
    rep.left_residuals.push_back((left - target).norm());
    rep.right_residuals.push_back((right - target).norm());
  }
  for (size_t i = 0; i < rep.left_residuals.size(); ++i)
    rep.max_residual = std::max(
        rep.max_residual,
        std::max(rep.left_residuals[i], rep.right_residuals[i]) / scale);
  rep.pass = rep.max_residual <= tol.residual_abs;
  return rep;
}

ToeplitzResult toeplitz_reconstruct(const MatrixPolynomial& P, int m, int q,
                                    const Tolerances& tol) {
  if (m < 0 || m > 4)
    throw UnsupportedOrderError("toeplitz_reconstruct: m must be in 0..4");
  if (q < 0) throw InputError("toeplitz_reconstruct: q must be >= 0");
  const Index n = P.dim();
  const Index nn = n * n;
  const int terms = m + q + 1;         // unknowns N_{-m}..N_q
  const Index cols = terms * nn;
  const Index rows = 2 * terms * nn;   // left + right identity per h

  Mat S = Mat::Zero(rows, cols);
  Vec b = Vec::Zero(rows);
  const Mat I = Mat::Identity(n, n);

  for (int h = 0; h <= m + q; ++h) {
    double jfact = 1.0;
    for (int j = 0; j <= h; ++j) {
      if (j > 0) jfact *= j;
      const Mat Aj = P.derivative_at_one(j) / jfact;
      const Index col0 = static_cast<Index>(h - j) * nn;  // unknown N_{h-m-j}
      // column-major vec: vec(N * Aj) = (Aj' kron I) vec(N) and
      //                   vec(Aj * N) = (I kron Aj) vec(N)
      for (Index c = 0; c < n; ++c)
        for (Index r = 0; r < n; ++r)
          for (Index d = 0; d < n; ++d) {
            S(static_cast<Index>(h) * nn + r * n + d, col0 + c * n + d) +=
                Aj(c, r);
            S(rows / 2 + static_cast<Index>(h) * nn + c * n + r,
              col0 + c * n + d) += Aj(r, d);
          }
    }
    if (h == m) {
      for (Index c = 0; c < n; ++c) {
        b(static_cast<Index>(h) * nn + c * n + c) = 1.0;
        b(rows / 2 + static_cast<Index>(h) * nn + c * n + c) = 1.0;
      }
    }
  }

  // the stacked system inherits the pole's conditioning (the principal
  // coefficients can be many orders larger than the data), so the solve runs
  // in extended precision like the quadrature does
  using MatL = Eigen::Matrix<LD, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<LD, Eigen::Dynamic, 1>;
  MatL SL = S.cast<LD>();
  VecL bL = b.cast<LD>();
  // JacobiSVD, not BDCSVD: Eigen's BDCSVD miscomputes with long double
  // scalars (its deflation indexing goes out of bounds under NDEBUG)
  Eigen::JacobiSVD<MatL> svd(SL, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecL& sv = svd.singularValues();
  const LD cutoff = sv.size() ? static_cast<LD>(tol.rank_rel) * sv(0) : 0.0L;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;

  // minimum-norm least-squares solution
  VecL xL = VecL::Zero(cols);
  VecL uty = svd.matrixU().transpose() * bL;
  for (Index i = 0; i < rank; ++i)
    xL += svd.matrixV().col(i) * (uty(i) / sv(i));
  Vec x = xL.cast<double>();

  if (rank < cols) {
    // the system is underdetermined; acceptable only when the free directions
    // never touch the principal block
    const Index pcols = static_cast<Index>(m) * nn;
    for (Index i = rank; i < sv.size(); ++i)
      if (svd.matrixV().col(i).head(pcols).norm() > 1e-8L)
        throw InputError(
            "toeplitz_reconstruct: principal part not determined at this q; increase q");
  }

  ToeplitzResult out;
  out.rank = rank;
  out.unknowns = cols;
  out.residual = (S * x - b).norm();
  out.exp.m = m;
  out.exp.radius = 0.0;
  out.exp.nodes = 0;
  out.exp.imag_leak = 0.0;
  for (int t = 0; t < terms; ++t) {
    Mat N(n, n);
    for (Index c = 0; c < n; ++c)
      for (Index r = 0; r < n; ++r) N(r, c) = x(static_cast<Index>(t) * nn + c * n + r);
    if (t < m)
      out.exp.principal.push_back(std::move(N));
    else
      out.exp.regular.push_back(std::move(N));
  }
  return out;
}

AnnihilationVerdict annihilation_check(const Mat& P_m,
                                       const LaurentExpansion& exp,
                                       const Tolerances& tol) {
  if (exp.m < 1)
    throw InputError("annihilation_check: expansion has no principal part");
  AnnihilationVerdict v;
  for (const Mat& N : exp.principal) v.scale = std::max(v.scale, N.norm());
  for (int j = exp.m; j >= 1; --j)
    v.residuals.push_back((P_m * exp.coeff(-j)).norm());
  v.pass = true;
  for (double r : v.residuals)
    if (r > tol.residual_abs * v.scale) v.pass = false;
  return v;
}

}  // namespace unitroot
