#pragma once

#include <array>
#include <functional>
#include <optional>

#include "chaoslab/netgen.hpp"
#include "chaoslab/pwl.hpp"

namespace chaoslab {

inline constexpr double kFixedPointMatchTol = 1e-8;
inline constexpr double kCycleDistinctTol = 1e-6;

enum class DetectionMethod { ExactPwl, Numeric };

// Period-3 classification of one map. is_period3 holds exactly when f^3 has
// fixed points beyond those of f after nearest-neighbour matching; a witness
// 3-cycle is extracted when one validates. Verdicts with tangency-flagged
// crossings or ambiguous matches are marked unreliable and should be dropped
// from Monte Carlo tallies (numerator and denominator).
struct ChaosVerdict {
  bool is_period3 = false;
  FixedPointSet fixed_points_f;
  FixedPointSet fixed_points_f3;
  std::optional<std::array<double, 3>> cycle;
  bool screen_fired = false;  // filled by callers that ran the y-sequence screen
  DetectionMethod method = DetectionMethod::ExactPwl;
  bool reliable = true;
  long grid_size = 0;  // numeric method only
};

// Sufficient condition on the pre-clip values at the bias points: some
// y_i > 1 followed (in index order) by some y_l < 0 forces a 3-cycle.
bool screen_period3(const YSequence& y);

// Exact detector: compares the fixed points of f and f^3 computed through the
// piecewise-linear algebra. Throws BudgetError when f^3 blows the budget.
ChaosVerdict detect_period3_exact(const PwlMap& map, long piece_budget = kDefaultPieceBudget);

// Numeric fallback for non-piecewise-linear activations: sign-change scan of
// f(x)-x and f^3(x)-x on a uniform grid (>= 10^4 nodes) with bisection
// refinement. The grid may miss tightly paired roots; the verdict records the
// grid size for audit.
ChaosVerdict detect_period3_numeric(const std::function<double(double)>& f, long grid_size);

// Whether f has a fixed point in (eps, 1]; the structural fixed point at 0
// (every sampled shallow map has f(0) = 0) is excluded.
bool has_nonzero_fixed_point(const PwlMap& map);

}  // namespace chaoslab
