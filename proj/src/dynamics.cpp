#include "chaoslab/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

template <typename Eval>
Eigen::VectorXd orbit(Eval&& f, double x0, int T) {
  if (T < 1) throw std::invalid_argument("trajectory: T must be >= 1");
  Eigen::VectorXd out(T + 1);
  out(0) = x0;
  double x = x0;
  for (int t = 1; t <= T; ++t) {
    x = f(x);
    out(t) = x;
  }
  return out;
}

template <typename Eval>
ScramblingReport report(Eval&& f, double x, double gap, int T) {
  if (gap < 0.0) throw std::invalid_argument("scrambling_report: gap must be nonnegative");
  const Eigen::VectorXd a = orbit(f, x, T);
  const Eigen::VectorXd b = orbit(f, x + gap, T);
  ScramblingReport rep;
  rep.horizon = T;
  rep.distances = (a - b).cwiseAbs();
  rep.initial_distance = rep.distances(0);
  const int lo = T / 2;
  rep.min_tail = rep.distances.segment(lo, T - lo + 1).minCoeff();
  rep.max_tail = rep.distances.segment(lo, T - lo + 1).maxCoeff();
  return rep;
}

}  // namespace

Eigen::VectorXd trajectory(const PwlMap& map, double x0, int T) {
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw std::domain_error("trajectory: x0 outside [0,1]");
  return orbit([&](double x) { return map(x); }, x0, T);
}

Eigen::VectorXd trajectory(const std::function<double(double)>& f, double x0, int T) {
  return orbit(f, x0, T);
}

ScramblingReport scrambling_report(const PwlMap& map, double x, double gap, int T) {
  if (!(x >= 0.0 && x + gap <= 1.0))
    throw std::domain_error("scrambling_report: x and x+gap must lie in [0,1]");
  return report([&](double y) { return map(y); }, x, gap, T);
}

ScramblingReport scrambling_report(const std::function<double(double)>& f, double x, double gap,
                                   int T) {
  return report(f, x, gap, T);
}

RegionGrowthSeries region_growth(const PwlMap& map, int T, long piece_budget, int fit_min_t) {
  if (T < 3) throw std::invalid_argument("region_growth: T must be >= 3");
  RegionGrowthSeries out;
  PwlMap cur = map;
  for (int t = 1; t <= T; ++t) {
    if (t > 1) {
      try {
        cur = compose(map, cur, piece_budget);
      } catch (const BudgetError&) {
        out.truncated_at = t;
        break;
      }
    }
    out.counts.push_back(count_regions(cur));
  }

  const int t_last = static_cast<int>(out.counts.size());
  if (t_last < 2) {
    out.fitted_rate = 1.0;
    return out;
  }
  int lo = std::max(1, std::min(fit_min_t, t_last - 3));  // keep >= 4 points when available
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int t = lo; t <= t_last; ++t) {
    const double y = std::log(static_cast<double>(out.counts[static_cast<std::size_t>(t - 1)]));
    sx += t;
    sy += y;
    sxx += static_cast<double>(t) * t;
    sxy += t * y;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  out.fitted_rate = denom > 0.0 ? std::exp((n * sxy - sx * sy) / denom) : 1.0;
  return out;
}

}  // namespace chaoslab
