#include "unitroot/matpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "unitroot/errors.hpp"

namespace unitroot {

MatrixPolynomial::MatrixPolynomial(std::vector<Mat> coeffs) {
  if (coeffs.empty()) throw ShapeError("MatrixPolynomial: empty coefficient list");
  dim_ = coeffs.front().rows();
  if (dim_ == 0) throw ShapeError("MatrixPolynomial: zero dimension");
  for (const Mat& A : coeffs) {
    if (A.rows() != dim_ || A.cols() != dim_)
      throw ShapeError("MatrixPolynomial: coefficients must all be n x n");
    if (!A.allFinite())
      throw InputError("MatrixPolynomial: non-finite coefficient entries");
  }
  // drop trailing exactly-zero leading coefficients so A_K != 0 unless K = 0
  while (coeffs.size() > 1 && coeffs.back().isZero(0.0)) coeffs.pop_back();
  coeffs_ = std::move(coeffs);
}

MatrixPolynomial MatrixPolynomial::from_var(const std::vector<Mat>& lag_matrices) {
  if (lag_matrices.empty())
    throw ShapeError("from_var: at least one lag matrix required");
  const Index n = lag_matrices.front().rows();
  std::vector<Mat> coeffs;
  coeffs.reserve(lag_matrices.size() + 1);
  coeffs.push_back(Mat::Identity(n, n));
  for (const Mat& A : lag_matrices) {
    if (A.rows() != n || A.cols() != n)
      throw ShapeError("from_var: lag matrices must be square and same size");
    coeffs.push_back(-A);
  }
  return MatrixPolynomial(std::move(coeffs));
}

CMat MatrixPolynomial::evaluate(Complex z) const {
  CMat acc = coeffs_.back().cast<Complex>();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
    acc = acc * z + it->cast<Complex>();
  return acc;
}

Mat MatrixPolynomial::evaluate_real(double z) const {
  Mat acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
    acc = acc * z + *it;
  return acc;
}

Mat MatrixPolynomial::derivative_at_one(int k) const {
  Mat out = Mat::Zero(dim_, dim_);
  const int K = degree();
  if (k > K) return out;
  for (int j = k; j <= K; ++j) {
    double fall = 1.0;  // j! / (j-k)!
    for (int t = 0; t < k; ++t) fall *= static_cast<double>(j - t);
    out += fall * coeffs_[static_cast<size_t>(j)];
  }
  return out;
}

std::vector<Mat> MatrixPolynomial::taylor_coeffs_at_one() const {
  std::vector<Mat> out;
  const int K = degree();
  out.reserve(static_cast<size_t>(K) + 1);
  double kfact = 1.0;
  for (int k = 0; k <= K; ++k) {
    if (k > 0) kfact *= k;
    out.push_back(derivative_at_one(k) / kfact);
  }
  return out;
}

namespace {

Complex det_at(const MatrixPolynomial& P, Complex z) {
  return P.evaluate(z).fullPivLu().determinant();
}

double binomial(int j, int m) {
  double b = 1.0;
  for (int t = 0; t < m; ++t) b *= static_cast<double>(j - t) / (m - t);
  return b;
}

}  // namespace

RootReport det_roots(const MatrixPolynomial& P, double cluster_tol,
                     double outside_margin) {
  using std::numbers::pi;
  RootReport rep;
  const int n = static_cast<int>(P.dim());
  const int K = P.degree();
  const int D = n * K;  // degree bound of det A(z)

  // identically-singular guard: sample det at a handful of generic points
  {
    double max_abs = 0.0;
    const double probes[] = {0.37261, -1.11873, 2.04919, 0.68411};
    for (double x : probes)
      max_abs = std::max(max_abs, std::abs(det_at(P, Complex(x, 0.21 + x * 0.13))));
    if (max_abs < 1e-300)
      throw DegenerateInputError("det_roots: det A(z) is identically zero");
  }

  if (D == 0) {
    rep.premise_ok = true;
    rep.min_outside_modulus = std::numeric_limits<double>::infinity();
    return rep;
  }

  // scalar det polynomial by interpolation at roots of unity (unitary DFT,
  // perfectly conditioned)
  const int S = D + 1;
  std::vector<Complex> samples(static_cast<size_t>(S));
  for (int j = 0; j < S; ++j) {
    Complex w = std::polar(1.0, 2.0 * pi * j / S);
    samples[static_cast<size_t>(j)] = det_at(P, w);
  }
  std::vector<double> c(static_cast<size_t>(S));
  double coeff_scale = 0.0;
  for (int k = 0; k < S; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < S; ++j)
      acc += samples[static_cast<size_t>(j)] * std::polar(1.0, -2.0 * pi * j * k / S);
    c[static_cast<size_t>(k)] = acc.real() / S;
    coeff_scale = std::max(coeff_scale, std::abs(c[static_cast<size_t>(k)]));
  }

  int d = D;
  while (d > 0 && std::abs(c[static_cast<size_t>(d)]) <= 1e-11 * coeff_scale) --d;

  // unit-root multiplicity from the Taylor coefficients of det at z = 1;
  // eigenvalue clustering alone cannot resolve multiplicity >= 3 in double
  // precision (a mu-fold root splits like eps^{1/mu})
  int mu = 0;
  for (int m = 0; m <= d; ++m) {
    double t = 0.0, scale = 0.0;
    for (int j = m; j <= d; ++j) {
      double term = binomial(j, m) * c[static_cast<size_t>(j)];
      t += term;
      scale += std::abs(term);
    }
    if (scale == 0.0 || std::abs(t) > 1e-8 * scale) {
      mu = m;
      break;
    }
    mu = m + 1;
  }
  rep.unit_root_multiplicity = mu;

  if (d == 0) {
    rep.premise_ok = true;
    rep.min_outside_modulus = std::numeric_limits<double>::infinity();
    return rep;
  }

  if (std::abs(c[static_cast<size_t>(d)]) < 1e-8 * coeff_scale)
    rep.companion_warning = true;

  // companion eigenvalues of the monic polynomial
  Mat comp = Mat::Zero(d, d);
  for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i)
    comp(i, d - 1) = -c[static_cast<size_t>(i)] / c[static_cast<size_t>(d)];
  Eigen::ComplexEigenSolver<CMat> es(comp.cast<Complex>());
  if (es.info() != Eigen::Success)
    throw ConvergenceError("det_roots: companion eigensolver failed");
  std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + d);

  // the mu roots closest to 1 form the unit cluster
  std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) {
    return std::abs(a - 1.0) < std::abs(b - 1.0);
  });
  std::vector<Complex> rest(ev.begin() + std::min<int>(mu, d), ev.end());

  if (mu > 0) {
    rep.roots.push_back(Complex(1.0, 0.0));
    rep.multiplicities.push_back(mu);
  }

  // greedy clustering of the remaining roots
  std::vector<bool> used(rest.size(), false);
  double min_mod = std::numeric_limits<double>::infinity();
  bool premise = true;
  for (size_t i = 0; i < rest.size(); ++i) {
    if (used[i]) continue;
    Complex center = rest[i];
    int mult = 0;
    for (size_t j = i; j < rest.size(); ++j) {
      if (!used[j] && std::abs(rest[j] - center) <= cluster_tol) {
        used[j] = true;
        ++mult;
      }
    }
    rep.roots.push_back(center);
    rep.multiplicities.push_back(mult);
    min_mod = std::min(min_mod, std::abs(center));
    if (std::abs(center) <= 1.0 + outside_margin) premise = false;
  }
  rep.min_outside_modulus = min_mod;
  rep.premise_ok = premise;
  return rep;
}

}  // namespace unitroot
