#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unitroot/numla.hpp"
#include "unitroot/polecore.hpp"

namespace unitroot {

/// The parallel-sum ingredients of the cointegration projector for a given
/// pole order. Only the members defined for that order are populated.
struct PiSet {
  std::optional<Mat> pi2;
  std::optional<Mat> pi3;
  std::optional<Mat> pi34;  ///< the m = 4 intermediate combined projector
  std::optional<Mat> pi4;
};

struct CointegrationResult {
  int m = 0;
  Mat P;                       ///< cointegration projector P_m
  PiSet pis;
  long rank = 0;               ///< numerical rank of P
  long rank_closed_form = 0;   ///< rank from the integer formulas
  std::vector<long> rank_formula_terms;
  bool consistent = false;     ///< rank == rank_closed_form
  bool stationary = false;     ///< m == 0: no unit root, P = I
  double idempotency = 0.0;
  double bordered_mismatch = 0.0;  ///< |bordered form - direct parallel sum|
};

/// Pi projectors for the report's pole order (requires m >= 2).
PiSet compute_pi(const PoleReport& report, const Tolerances& tol = {});

/// Cointegration projector P_m, its rank, and the closed-form rank terms.
CointegrationResult compute_P(const PoleReport& report, const PiSet& pis,
                              const Tolerances& tol = {});

/// Closed-form cointegration rank together with the integers entering the
/// formula. Returned terms: m=1 -> {r(C0)}; m=2 -> {r(C0), r(inner)};
/// m=3 -> {r(C0), r(stack)}; m=4 -> {r(C0), r(stack), r(Xi), r([Xi, Gamma])}.
long coint_rank(const PoleReport& report, const PiSet& pis,
                std::vector<long>& terms, const Tolerances& tol = {});

}  // namespace unitroot
