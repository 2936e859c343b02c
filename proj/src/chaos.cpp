#include "chaoslab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

// Matches every fixed point of f into the fixed points of f^3 (they are a
// subset in exact arithmetic), counts the leftovers, and extracts a 3-cycle
// from one of them. Ambiguous matches and subset violations make the verdict
// unreliable instead of silently picking a side.
void classify(ChaosVerdict& v, const std::function<double(double)>& f) {
  const auto& p1 = v.fixed_points_f.points;
  const auto& p3 = v.fixed_points_f3.points;
  std::vector<bool> used(static_cast<std::size_t>(p3.size()), false);

  for (Eigen::Index i = 0; i < p1.size(); ++i) {
    const double a = p1(i);
    Eigen::Index best = -1;
    int candidates = 0;
    for (Eigen::Index j = 0; j < p3.size(); ++j) {
      if (std::abs(p3(j) - a) > kFixedPointMatchTol) continue;
      ++candidates;
      if (best < 0 || std::abs(p3(j) - a) < std::abs(p3(best) - a)) best = j;
    }
    if (best < 0) {
      v.reliable = false;  // subset invariant violated
      continue;
    }
    if (candidates > 1 || used[static_cast<std::size_t>(best)]) v.reliable = false;
    used[static_cast<std::size_t>(best)] = true;
  }

  std::vector<Eigen::Index> unmatched;
  for (Eigen::Index j = 0; j < p3.size(); ++j)
    if (!used[static_cast<std::size_t>(j)]) unmatched.push_back(j);
  v.is_period3 = !unmatched.empty();

  for (Eigen::Index j : unmatched) {
    const double c1 = p3(j);
    const double c2 = f(c1);
    const double c3 = f(c2);
    const bool closes = std::abs(f(c3) - c1) <= kFixedPointMatchTol;
    const bool distinct = std::abs(c1 - c2) > kCycleDistinctTol &&
                          std::abs(c2 - c3) > kCycleDistinctTol &&
                          std::abs(c1 - c3) > kCycleDistinctTol;
    if (closes && distinct) {
      v.cycle = {c1, c2, c3};
      break;
    }
  }
}

// Roots of g on [0,1] via sign changes on a uniform grid, refined by
// bisection well past the 1e-10 requirement, deduplicated at match tolerance.
std::vector<double> grid_roots(const std::function<double(double)>& g, long grid_size) {
  std::vector<double> roots;
  auto emit = [&](double r) {
    if (!roots.empty() && r - roots.back() <= kFixedPointMatchTol) return;
    roots.push_back(r);
  };

  double prev = g(0.0);
  if (prev == 0.0) emit(0.0);
  double xprev = 0.0;
  for (long j = 1; j <= grid_size; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(grid_size);
    const double cur = g(x);
    if (cur == 0.0) {
      emit(x);
    } else if (prev != 0.0 && ((prev < 0.0) != (cur < 0.0))) {
      double a = xprev, b = x, ga = prev;
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double gm = g(m);
        if (gm == 0.0) {
          a = b = m;
          break;
        }
        if ((ga < 0.0) == (gm < 0.0)) {
          a = m;
          ga = gm;
        } else {
          b = m;
        }
      }
      emit(0.5 * (a + b));
    }
    prev = cur;
    xprev = x;
  }
  return roots;
}

FixedPointSet roots_to_set(const std::vector<double>& roots) {
  FixedPointSet out;
  out.points = Eigen::Map<const Eigen::VectorXd>(roots.data(),
                                                 static_cast<Eigen::Index>(roots.size()));
  out.segment_indices.assign(roots.size(), -1);
  out.tangency_flags.assign(roots.size(), false);
  return out;
}

}  // namespace

bool screen_period3(const YSequence& y) {
  bool seen_high = false;
  for (Eigen::Index i = 0; i < y.values.size(); ++i) {
    const double v = y.values(i);
    if (v > 1.0)
      seen_high = true;
    else if (seen_high && v < 0.0)
      return true;
  }
  return false;
}

ChaosVerdict detect_period3_exact(const PwlMap& map, long piece_budget) {
  ChaosVerdict v;
  v.method = DetectionMethod::ExactPwl;
  const PwlMap f3 = iterate_t(map, 3, piece_budget);
  v.fixed_points_f = fixed_points(map);
  v.fixed_points_f3 = fixed_points(f3);
  if (v.fixed_points_f.any_tangency() || v.fixed_points_f3.any_tangency()) v.reliable = false;
  classify(v, [&map](double x) { return map(std::clamp(x, 0.0, 1.0)); });
  return v;
}

ChaosVerdict detect_period3_numeric(const std::function<double(double)>& f, long grid_size) {
  if (grid_size < 10000)
    throw std::invalid_argument("detect_period3_numeric: grid_size must be >= 10^4");
  ChaosVerdict v;
  v.method = DetectionMethod::Numeric;
  v.grid_size = grid_size;
  v.fixed_points_f = roots_to_set(grid_roots([&](double x) { return f(x) - x; }, grid_size));
  v.fixed_points_f3 =
      roots_to_set(grid_roots([&](double x) { return f(f(f(x))) - x; }, grid_size));
  classify(v, f);
  return v;
}

bool has_nonzero_fixed_point(const PwlMap& map) {
  const FixedPointSet fps = fixed_points(map);
  for (Eigen::Index i = 0; i < fps.points.size(); ++i)
    if (fps.points(i) > 1e-9) return true;
  return false;
}

}  // namespace chaoslab
