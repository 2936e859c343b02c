#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <vector>

#include "chaoslab/pwl.hpp"

namespace chaoslab {

// Orbit (x0, f(x0), ..., f^T(x0)) by direct evaluation of the base map;
// the composed f^t is never formed.
Eigen::VectorXd trajectory(const PwlMap& map, double x0, int T);
Eigen::VectorXd trajectory(const std::function<double(double)>& f, double x0, int T);

// Finite-horizon proxies for the proximal/asymptotic dichotomy: the distance
// series of two nearby starting points plus min/max over the tail window
// [T/2, T]. Any finite check of the liminf/limsup definitions is a proxy, so
// the raw statistics are reported rather than a binary scrambled label.
struct ScramblingReport {
  int horizon = 0;
  Eigen::VectorXd distances;  // d_t = |f^t(x) - f^t(y)|, t = 0..T
  double initial_distance = 0.0;
  double min_tail = 0.0;
  double max_tail = 0.0;
};

ScramblingReport scrambling_report(const PwlMap& map, double x, double gap, int T);
ScramblingReport scrambling_report(const std::function<double(double)>& f, double x, double gap,
                                   int T);

// Region counts of f^t for t = 1..T and the least-squares growth rate of
// log(count) over the fit window. Budget exhaustion truncates the series
// (recorded in truncated_at) instead of failing.
struct RegionGrowthSeries {
  std::vector<long> counts;  // counts[t-1] = regions of f^t
  double fitted_rate = 1.0;
  std::optional<int> truncated_at;
};

// fit_min_t drops the transient (early counts reflect the base map's k
// breakpoints, not the asymptotic rate); the window widens automatically so
// at least 4 points enter the fit whenever that many exist.
RegionGrowthSeries region_growth(const PwlMap& map, int T, long piece_budget,
                                 int fit_min_t = 3);

}  // namespace chaoslab
