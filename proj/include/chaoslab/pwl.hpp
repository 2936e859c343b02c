#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace chaoslab {

// Tolerances shared by the piecewise-linear kernels.
inline constexpr double kBreakpointDedupTol = 1e-12;  // absolute; merged keeping the left value
inline constexpr double kSlopeMergeTol = 1e-9;        // relative, region merging
inline constexpr double kFixedPointDedupTol = 1e-10;
inline constexpr double kEvalTol = 1e-9;
inline constexpr long kDefaultPieceBudget = 4'000'000;

// Continuous piecewise-linear map on [0,1]: the linear interpolant through
// (breakpoints[i], values[i]). Breakpoints are strictly increasing with
// breakpoints[0] == 0 and breakpoints[last] == 1. Continuity is structural,
// so repeated composition cannot drift a map apart. Immutable once built;
// safe to share across threads.
class PwlMap {
 public:
  PwlMap(Eigen::VectorXd breakpoints, Eigen::VectorXd values);

  const Eigen::VectorXd& breakpoints() const { return breakpoints_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return breakpoints_.size(); }
  Eigen::Index piece_count() const { return breakpoints_.size() - 1; }

  // Evaluation at x in [0,1]; exact (the stored value) at breakpoints.
  double operator()(double x) const;

 private:
  Eigen::VectorXd breakpoints_;
  Eigen::VectorXd values_;
};

struct FixedPointSet {
  Eigen::VectorXd points;  // ascending, deduplicated
  std::vector<Eigen::Index> segment_indices;
  std::vector<bool> tangency_flags;  // piece runs along the diagonal (slope ~ 1)

  Eigen::Index count() const { return points.size(); }
  bool any_tangency() const;
};

double evaluate(const PwlMap& map, double x);

// Values of the map at n evenly spaced abscissae covering [0,1] (n >= 2).
// Linear in n + piece count, unlike repeated binary-search evaluation.
Eigen::VectorXd evaluate_grid(const PwlMap& map, Eigen::Index n);

// The unclipped network map x -> sum_i weights[i] * relu(x - biases[i]).
// Biases must be strictly increasing and lie in [0,1); a first bias of
// exactly 0 is accepted so the triangle-wave parameters are representable.
PwlMap from_relu_sum(const Eigen::VectorXd& weights, const Eigen::VectorXd& biases);

// Same sum for arbitrary finite biases (perturbed networks): units with
// bias <= 0 are active on the whole domain, units with bias >= 1 never fire.
// Sorts the (weight, bias) pairs internally.
PwlMap from_relu_sum_general(Eigen::VectorXd weights, Eigen::VectorXd biases);

// Pointwise min(max(f, 0), 1) with breakpoints inserted exactly where f
// crosses the levels 0 and 1.
PwlMap clip_apply(const PwlMap& map);

// Pointwise max(f, 0).
PwlMap relu_apply(const PwlMap& map);

// Exact composition outer(inner(x)). Requires the range of `inner` to lie in
// [0,1]. Throws BudgetError once the result would exceed `piece_budget`
// pieces before collinear simplification.
PwlMap compose(const PwlMap& outer, const PwlMap& inner,
               long piece_budget = kDefaultPieceBudget);

// Composition with a continuous piecewise-linear outer function defined on
// the whole real line, given its sorted hinge abscissae and an evaluator.
// The inner map may take any finite values (unrolled feedforward stages are
// not clipped between layers).
PwlMap compose_unbounded(const std::function<double(double)>& outer,
                         const Eigen::VectorXd& outer_hinges, const PwlMap& inner,
                         long piece_budget = kDefaultPieceBudget);

// t-fold self composition. Throws BudgetError carrying the iteration that
// first exceeded the budget; exponential blowup is the expected failure mode
// for chaotic maps, so it surfaces instead of being truncated.
PwlMap iterate_t(const PwlMap& map, int t, long piece_budget = kDefaultPieceBudget);

// All solutions of f(x) = x, one per crossing piece. Pieces lying on the
// diagonal within tolerance are reported as flagged endpoint pairs, never as
// an interval.
FixedPointSet fixed_points(const PwlMap& map);

// Number of maximal affine intervals; consecutive pieces whose slopes agree
// to kSlopeMergeTol (relative) count as one region.
long count_regions(const PwlMap& map);

// Pointwise algebra used by the depth-2 builder.
PwlMap scale(const PwlMap& map, double factor);
PwlMap add(const PwlMap& a, const PwlMap& b);
PwlMap add_constant(const PwlMap& map, double c);

// The classic height-1 triangle wave: 2x on [0,1/2], 2(1-x) on (1/2,1].
PwlMap reference_triangle();

}  // namespace chaoslab
