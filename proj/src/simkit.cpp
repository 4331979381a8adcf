#include "unitroot/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "unitroot/errors.hpp"

namespace unitroot {

namespace {

std::vector<Mat> poly_multiply(const std::vector<Mat>& L,
                               const std::vector<Mat>& R) {
  const Index n = L.front().rows();
  std::vector<Mat> out(L.size() + R.size() - 1, Mat::Zero(n, n));
  for (size_t i = 0; i < L.size(); ++i)
    for (size_t j = 0; j < R.size(); ++j) out[i + j] += L[i] * R[j];
  return out;
}

// I + p(z) e_i e_j' with random p; det is identically 1. Coefficients stay
// well under the magnitude cap of 1: the oracle quadrature error scales with
// the conditioning of E(z)A(z)F(z), and +-0.5 keeps products of several ops
// comfortably conditioned.
std::vector<Mat> elementary_op(Index n, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  Index i = pick(rng);
  Index j = pick(rng);
  while (j == i) j = pick(rng);
  std::vector<Mat> op(static_cast<size_t>(degree) + 1, Mat::Zero(n, n));
  op[0] = Mat::Identity(n, n);
  for (auto& c : op) c(i, j) += unif(rng);
  return op;
}

std::vector<Mat> unimodular_factor(Index n, int degree, int num_ops,
                                   std::mt19937_64& rng) {
  std::vector<Mat> acc{Mat::Identity(n, n)};
  for (int k = 0; k < num_ops; ++k)
    acc = poly_multiply(acc, elementary_op(n, degree, rng));
  return acc;
}

double prefix_variance_slope(const Mat& series) {
  const Index T = series.rows();
  // total variance over growing prefix windows; dyadic lengths down to 64
  std::vector<double> logw, logv;
  for (Index w = T; w >= 64; w /= 2) {
    const Mat block = series.topRows(w);
    const Eigen::RowVectorXd mean = block.colwise().mean();
    const double var =
        (block.rowwise() - mean).squaredNorm() / static_cast<double>(w);
    if (var < 1e-300) return 0.0;  // identically constant series
    logw.push_back(std::log(static_cast<double>(w)));
    logv.push_back(std::log(var));
  }
  if (logw.size() < 2) return 0.0;
  double mw = 0.0, mv = 0.0;
  for (size_t i = 0; i < logw.size(); ++i) {
    mw += logw[i];
    mv += logv[i];
  }
  mw /= logw.size();
  mv /= logv.size();
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < logw.size(); ++i) {
    num += (logw[i] - mw) * (logv[i] - mv);
    den += (logw[i] - mw) * (logw[i] - mw);
  }
  return den > 0.0 ? num / den : 0.0;
}

Mat difference(const Mat& series) {
  return series.bottomRows(series.rows() - 1) -
         series.topRows(series.rows() - 1);
}

}  // namespace

SmithModel generate_smith_model(const SmithSpec& spec) {
  if (spec.n < 1) throw InputError("generate_smith_model: n must be >= 1");
  if (static_cast<Index>(spec.degrees.size()) != spec.n)
    throw InputError("generate_smith_model: degrees must have n entries");
  int dmax = 0;
  int prev = 4;
  for (int d : spec.degrees) {
    if (d < 0 || d > 4)
      throw InputError("generate_smith_model: degrees must lie in 0..4");
    if (d > prev)
      throw InputError("generate_smith_model: degrees must be non-increasing");
    prev = d;
    dmax = std::max(dmax, d);
  }
  if (spec.unimodular_degree < 0 || spec.num_ops < 0)
    throw InputError("generate_smith_model: negative factor parameters");

  const Index n = spec.n;
  std::mt19937_64 rng(spec.seed);

  // D(z) = diag((1-z)^{d_i})
  std::vector<Mat> D(static_cast<size_t>(dmax) + 1, Mat::Zero(n, n));
  for (Index i = 0; i < n; ++i) {
    const int d = spec.degrees[static_cast<size_t>(i)];
    double binom = 1.0;
    for (int k = 0; k <= d; ++k) {
      D[static_cast<size_t>(k)](i, i) = (k % 2 == 0 ? binom : -binom);
      binom = binom * (d - k) / (k + 1);
    }
  }

  std::vector<Mat> A = D;
  if (spec.num_ops > 0) {
    auto E = unimodular_factor(n, spec.unimodular_degree, spec.num_ops, rng);
    auto F = unimodular_factor(n, spec.unimodular_degree, spec.num_ops, rng);
    A = poly_multiply(poly_multiply(E, D), F);
  }
  return {MatrixPolynomial(std::move(A)), dmax};
}

MatrixPolynomial to_var_form(const MatrixPolynomial& P) {
  Eigen::FullPivLU<Mat> lu(P.coeff(0));
  if (!lu.isInvertible())
    throw InputError("to_var_form: leading coefficient A_0 is singular");
  std::vector<Mat> coeffs;
  coeffs.reserve(static_cast<size_t>(P.degree()) + 1);
  for (int k = 0; k <= P.degree(); ++k) coeffs.push_back(lu.solve(P.coeff(k)));
  return MatrixPolynomial(std::move(coeffs));
}

Trajectory simulate_var(const MatrixPolynomial& P, Index T, const Mat& sigma,
                        std::uint64_t seed) {
  const Index n = P.dim();
  if (T < 1) throw InputError("simulate_var: T must be >= 1");
  if ((P.coeff(0) - Mat::Identity(n, n)).norm() > 1e-12)
    throw InputError("simulate_var: polynomial must be in VAR form (A_0 = I)");
  if (sigma.rows() != n || sigma.cols() != n ||
      (sigma - sigma.transpose()).norm() > 1e-12)
    throw InputError("simulate_var: sigma must be symmetric n x n");

  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma);
  if (eig.eigenvalues().minCoeff() < -1e-12)
    throw InputError("simulate_var: sigma must be positive semidefinite");
  const Mat L = eig.eigenvectors() *
                eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int K = P.degree();
  Trajectory traj;
  traj.n = n;
  traj.T = T;
  traj.noise_cov = sigma;
  traj.seed = seed;
  traj.values = Mat::Zero(T, n);
  Vec y(n), eps(n);
  for (Index t = 0; t < T; ++t) {
    for (Index i = 0; i < n; ++i) eps(i) = gauss(rng);
    y = L * eps;
    // lag matrices are -A_k in the characteristic polynomial convention
    for (int k = 1; k <= K && t - k >= 0; ++k)
      y -= P.coeff(k) * traj.values.row(t - k).transpose();
    traj.values.row(t) = y.transpose();
  }
  return traj;
}

DiagnosticsReport integration_diagnostics(const Trajectory& traj, int m,
                                          const Mat& P_m, double threshold) {
  if (m < 0) throw InputError("integration_diagnostics: m must be >= 0");
  DiagnosticsReport rep;
  rep.threshold = threshold;

  Mat series = traj.values;
  for (int d = 0; d <= m; ++d) {
    const double slope = prefix_variance_slope(series);
    rep.slopes.push_back(slope);
    rep.stationary.push_back(slope < threshold);
    if (d < m) series = difference(series);
  }

  const Mat projected = traj.values * P_m.transpose();
  rep.projected_slope = prefix_variance_slope(projected);
  rep.projected_stationary = rep.projected_slope < threshold;
  return rep;
}

}  // namespace unitroot
