#pragma once

#include <string>
#include <vector>

#include "unitroot/coint.hpp"
#include "unitroot/laurent.hpp"
#include "unitroot/matpoly.hpp"
#include "unitroot/numla.hpp"
#include "unitroot/polecore.hpp"

namespace unitroot {

/// On-disk model description (JSON). form "general" stores A_0..A_K; form
/// "var" stores the lag matrices A_1..A_K of A(z) = I - sum A_k z^k.
struct ModelFile {
  int schema = 1;
  Index n = 0;
  int K = 0;
  std::string form = "general";
  std::vector<Mat> coeffs;
  Tolerances tol;
};

ModelFile load_model(const std::string& path);
void save_model(const ModelFile& model, const std::string& path);
MatrixPolynomial to_polynomial(const ModelFile& model);

struct Verdict {
  std::string name;
  std::string status;  ///< pass | fail | warn
  double residual = 0.0;
};

struct AnalysisReport {
  int schema = 1;
  int m = 0;
  int mu = 0;
  bool premise_ok = true;
  bool stationary = false;
  std::vector<std::string> warnings;
  std::vector<double> chain_sigma_min;
  std::vector<double> chain_sigma_max;
  std::vector<Mat> principal_oracle;   ///< N_{-m}..N_{-1}
  Mat leading_closed;                  ///< closed-form N_{-m}
  Mat P;                               ///< cointegration projector
  long rank = 0;
  long rank_closed_form = 0;
  std::vector<long> rank_formula_terms;
  double radius = 0.0;
  int nodes = 0;
  double imag_leak = 0.0;
  std::vector<Verdict> verdicts;
  int exit_code = 0;  ///< 0 all-pass, 2 verification failure, 3 unsupported
};

struct AnalyzeOptions {
  double radius = 0.0;  ///< <= 0: automatic
  int nodes = 0;        ///< 0: automatic doubling
  int max_order = 4;
};

/// Full pipeline: roots -> chain -> oracle -> closed forms -> cointegration,
/// with cross-validation verdicts. UnsupportedOrderError propagates to the
/// caller (maps to exit code 3).
AnalysisReport analyze_model(const MatrixPolynomial& P, const Tolerances& tol,
                             const AnalyzeOptions& opts = {});

std::string report_to_json(const AnalysisReport& rep);
std::string report_to_pretty(const AnalysisReport& rep);

}  // namespace unitroot
