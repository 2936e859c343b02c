#include "chaoslab/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Appends (x, v), merging into the previous point when the gap is below the
// dedup tolerance (the left value wins).
void push_point(std::vector<double>& xs, std::vector<double>& vs, double x, double v) {
  if (!xs.empty() && x - xs.back() <= kBreakpointDedupTol) return;
  xs.push_back(x);
  vs.push_back(v);
}

// The final abscissa must be exactly 1 even if a crossing landed within the
// dedup tolerance of it.
void push_final(std::vector<double>& xs, std::vector<double>& vs, double v) {
  if (!xs.empty() && 1.0 - xs.back() <= kBreakpointDedupTol) {
    xs.back() = 1.0;
    vs.back() = v;
    return;
  }
  xs.push_back(1.0);
  vs.push_back(v);
}

// Removes interior points that are exactly collinear with their neighbours
// (cross-multiplied slope test, so no division). Clipped maps produce long
// flat runs at 0 and 1; dropping them keeps repeated composition linear in
// the true region count instead of the raw breakpoint count. The interpolant
// is unchanged up to one rounding of the slope products.
void drop_collinear(std::vector<double>& xs, std::vector<double>& vs) {
  const std::size_t n = xs.size();
  if (n <= 2) return;
  std::vector<double> ox, ov;
  ox.reserve(n);
  ov.reserve(n);
  ox.push_back(xs[0]);
  ov.push_back(vs[0]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double a = (vs[j] - ov.back()) * (xs[j + 1] - xs[j]);
    const double b = (vs[j + 1] - vs[j]) * (xs[j] - ox.back());
    if (a == b) continue;
    ox.push_back(xs[j]);
    ov.push_back(vs[j]);
  }
  ox.push_back(xs[n - 1]);
  ov.push_back(vs[n - 1]);
  xs.swap(ox);
  vs.swap(ov);
}

PwlMap build(std::vector<double>&& xs, std::vector<double>&& vs) {
  drop_collinear(xs, vs);
  return PwlMap(to_vector(xs), to_vector(vs));
}

// Range slack tolerated when a composed map's values should lie in [0,1].
constexpr double kRangeSlack = 1e-9;

void require_unit_range(const PwlMap& m, const char* who) {
  const double lo = m.values().minCoeff();
  const double hi = m.values().maxCoeff();
  if (lo < -kRangeSlack || hi > 1.0 + kRangeSlack)
    throw std::invalid_argument(std::string(who) + ": map range escapes [0,1]; clip first");
}

PwlMap clip_to_band(const PwlMap& m, std::optional<double> lo, std::optional<double> hi) {
  const auto& bp = m.breakpoints();
  const auto& val = m.values();
  auto clamp_band = [&](double v) {
    if (lo && v < *lo) return *lo;
    if (hi && v > *hi) return *hi;
    return v;
  };

  std::vector<double> xs, vs;
  xs.reserve(static_cast<std::size_t>(bp.size()) + 8);
  vs.reserve(xs.capacity());
  xs.push_back(0.0);
  vs.push_back(clamp_band(val(0)));

  const Eigen::Index pieces = m.piece_count();
  for (Eigen::Index s = 0; s < pieces; ++s) {
    const double x0 = bp(s), x1 = bp(s + 1);
    const double v0 = val(s), v1 = val(s + 1);
    double cx[2], cv[2];
    int nc = 0;
    auto consider = [&](double level) {
      if ((v0 < level && v1 > level) || (v0 > level && v1 < level)) {
        const double xc = x0 + (level - v0) / (v1 - v0) * (x1 - x0);
        if (xc > x0 && xc < x1) {
          cx[nc] = xc;
          cv[nc] = level;
          ++nc;
        }
      }
    };
    if (lo) consider(*lo);
    if (hi) consider(*hi);
    if (nc == 2 && cx[0] > cx[1]) {
      std::swap(cx[0], cx[1]);
      std::swap(cv[0], cv[1]);
    }
    for (int c = 0; c < nc; ++c) push_point(xs, vs, cx[c], cv[c]);
    if (s + 1 == pieces)
      push_final(xs, vs, clamp_band(v1));
    else
      push_point(xs, vs, x1, clamp_band(v1));
  }
  return build(std::move(xs), std::move(vs));
}

}  // namespace

PwlMap::PwlMap(Eigen::VectorXd breakpoints, Eigen::VectorXd values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.size() < 2 || breakpoints_.size() != values_.size())
    throw std::invalid_argument("PwlMap: breakpoints/values must match and have length >= 2");
  if (!breakpoints_.allFinite() || !values_.allFinite())
    throw std::invalid_argument("PwlMap: non-finite entry");
  if (breakpoints_(0) != 0.0 || breakpoints_(breakpoints_.size() - 1) != 1.0)
    throw std::invalid_argument("PwlMap: domain must be exactly [0,1]");
  for (Eigen::Index i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_(i) > breakpoints_(i - 1)))
      throw std::invalid_argument("PwlMap: breakpoints must be strictly increasing");
}

double PwlMap::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("PwlMap: evaluation outside [0,1]");
  const double* begin = breakpoints_.data();
  const double* end = begin + breakpoints_.size();
  Eigen::Index i = std::upper_bound(begin, end, x) - begin - 1;
  if (i < 0) i = 0;
  if (i > breakpoints_.size() - 2) i = breakpoints_.size() - 2;
  if (x == breakpoints_(i)) return values_(i);
  if (x == breakpoints_(i + 1)) return values_(i + 1);
  const double t = (x - breakpoints_(i)) / (breakpoints_(i + 1) - breakpoints_(i));
  return values_(i) + t * (values_(i + 1) - values_(i));
}

bool FixedPointSet::any_tangency() const {
  for (bool f : tangency_flags)
    if (f) return true;
  return false;
}

double evaluate(const PwlMap& map, double x) { return map(x); }

Eigen::VectorXd evaluate_grid(const PwlMap& map, Eigen::Index n) {
  if (n < 2) throw std::invalid_argument("evaluate_grid: need at least 2 samples");
  const auto& bp = map.breakpoints();
  const auto& v = map.values();
  Eigen::VectorXd out(n);
  Eigen::Index seg = 0;
  const Eigen::Index last = bp.size() - 2;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(n - 1);
    while (seg < last && x > bp(seg + 1)) ++seg;
    if (x == bp(seg)) {
      out(j) = v(seg);
    } else if (x == bp(seg + 1)) {
      out(j) = v(seg + 1);
    } else {
      const double t = (x - bp(seg)) / (bp(seg + 1) - bp(seg));
      out(j) = v(seg) + t * (v(seg + 1) - v(seg));
    }
  }
  return out;
}

PwlMap from_relu_sum(const Eigen::VectorXd& weights, const Eigen::VectorXd& biases) {
  if (weights.size() != biases.size())
    throw std::invalid_argument("from_relu_sum: weights/biases length mismatch");
  for (Eigen::Index i = 0; i < biases.size(); ++i) {
    if (!(biases(i) >= 0.0 && biases(i) < 1.0))
      throw std::invalid_argument("from_relu_sum: biases must lie in [0,1)");
    if (i > 0 && !(biases(i) > biases(i - 1)))
      throw std::invalid_argument("from_relu_sum: biases must be strictly increasing");
  }
  return from_relu_sum_general(weights, biases);
}

PwlMap from_relu_sum_general(Eigen::VectorXd weights, Eigen::VectorXd biases) {
  if (weights.size() != biases.size())
    throw std::invalid_argument("from_relu_sum_general: weights/biases length mismatch");
  if (!weights.allFinite() || !biases.allFinite())
    throw std::invalid_argument("from_relu_sum_general: non-finite parameter");

  const Eigen::Index k = weights.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return biases(a) < biases(b); });

  std::vector<double> xs, vs;
  xs.reserve(static_cast<std::size_t>(k) + 2);
  vs.reserve(xs.capacity());

  double slope = 0.0, value = 0.0;
  std::size_t i = 0;
  // Units hinged at or below 0 (within dedup tolerance) contribute an affine
  // part over the whole domain.
  for (; i < order.size(); ++i) {
    const double b = biases(order[i]);
    if (b > kBreakpointDedupTol) break;
    slope += weights(order[i]);
    value += weights(order[i]) * (0.0 - b);
  }
  xs.push_back(0.0);
  vs.push_back(value);

  double x = 0.0;
  for (; i < order.size(); ++i) {
    const double b = biases(order[i]);
    if (b > 1.0 - kBreakpointDedupTol) break;  // never fires inside [0,1]
    if (b - x > kBreakpointDedupTol) {
      value += slope * (b - x);
      x = b;
      xs.push_back(x);
      vs.push_back(value);
    }
    slope += weights(order[i]);
  }
  push_final(xs, vs, value + slope * (1.0 - x));
  return PwlMap(to_vector(xs), to_vector(vs));
}

PwlMap clip_apply(const PwlMap& map) { return clip_to_band(map, 0.0, 1.0); }

PwlMap relu_apply(const PwlMap& map) { return clip_to_band(map, 0.0, std::nullopt); }

PwlMap compose(const PwlMap& outer, const PwlMap& inner, long piece_budget) {
  require_unit_range(inner, "compose");
  const auto& ib = inner.breakpoints();
  const auto& iv = inner.values();
  const auto& ob = outer.breakpoints();
  const double* ob_begin = ob.data();
  const double* ob_end = ob_begin + ob.size();

  // First pass collects the abscissae together with the inner value there;
  // crossings carry the outer breakpoint level exactly.
  std::vector<double> xs, inner_vals;
  xs.reserve(static_cast<std::size_t>(ib.size()) * 2);
  inner_vals.reserve(xs.capacity());
  xs.push_back(0.0);
  inner_vals.push_back(iv(0));

  const Eigen::Index pieces = inner.piece_count();
  for (Eigen::Index s = 0; s < pieces; ++s) {
    const double x0 = ib(s), x1 = ib(s + 1);
    const double v0 = iv(s), v1 = iv(s + 1);
    if (v1 > v0) {
      const double* first = std::upper_bound(ob_begin, ob_end, v0);
      for (const double* c = first; c != ob_end && *c < v1; ++c) {
        const double xc = x0 + (*c - v0) / (v1 - v0) * (x1 - x0);
        push_point(xs, inner_vals, xc, *c);
      }
    } else if (v1 < v0) {
      const double* first = std::upper_bound(ob_begin, ob_end, v1);
      const double* last = std::lower_bound(ob_begin, ob_end, v0);
      for (const double* c = last; c-- != first;) {
        const double xc = x0 + (*c - v0) / (v1 - v0) * (x1 - x0);
        push_point(xs, inner_vals, xc, *c);
      }
    }
    if (s + 1 == pieces)
      push_final(xs, inner_vals, v1);
    else
      push_point(xs, inner_vals, x1, v1);
    if (static_cast<long>(xs.size()) - 1 > piece_budget)
      throw BudgetError("compose: piece budget " + std::to_string(piece_budget) + " exceeded",
                        0, static_cast<long>(xs.size()) - 1);
  }

  for (double& v : inner_vals) {
    const double y = std::clamp(v, 0.0, 1.0);
    v = evaluate(outer, y);
  }
  return build(std::move(xs), std::move(inner_vals));
}

PwlMap compose_unbounded(const std::function<double(double)>& outer,
                         const Eigen::VectorXd& outer_hinges, const PwlMap& inner,
                         long piece_budget) {
  for (Eigen::Index i = 1; i < outer_hinges.size(); ++i)
    if (!(outer_hinges(i) >= outer_hinges(i - 1)))
      throw std::invalid_argument("compose_unbounded: hinges must be sorted");
  const auto& ib = inner.breakpoints();
  const auto& iv = inner.values();
  const double* h_begin = outer_hinges.data();
  const double* h_end = h_begin + outer_hinges.size();

  std::vector<double> xs, inner_vals;
  xs.reserve(static_cast<std::size_t>(ib.size()) * 2);
  inner_vals.reserve(xs.capacity());
  xs.push_back(0.0);
  inner_vals.push_back(iv(0));

  const Eigen::Index pieces = inner.piece_count();
  for (Eigen::Index s = 0; s < pieces; ++s) {
    const double x0 = ib(s), x1 = ib(s + 1);
    const double v0 = iv(s), v1 = iv(s + 1);
    if (v1 > v0) {
      const double* first = std::upper_bound(h_begin, h_end, v0);
      for (const double* c = first; c != h_end && *c < v1; ++c)
        push_point(xs, inner_vals, x0 + (*c - v0) / (v1 - v0) * (x1 - x0), *c);
    } else if (v1 < v0) {
      const double* first = std::upper_bound(h_begin, h_end, v1);
      const double* last = std::lower_bound(h_begin, h_end, v0);
      for (const double* c = last; c-- != first;)
        push_point(xs, inner_vals, x0 + (*c - v0) / (v1 - v0) * (x1 - x0), *c);
    }
    if (s + 1 == pieces)
      push_final(xs, inner_vals, v1);
    else
      push_point(xs, inner_vals, x1, v1);
    if (static_cast<long>(xs.size()) - 1 > piece_budget)
      throw BudgetError("compose_unbounded: piece budget exceeded", 0,
                        static_cast<long>(xs.size()) - 1);
  }
  for (double& v : inner_vals) v = outer(v);
  return build(std::move(xs), std::move(inner_vals));
}

PwlMap iterate_t(const PwlMap& map, int t, long piece_budget) {
  if (t < 1) throw std::invalid_argument("iterate_t: t must be >= 1");
  require_unit_range(map, "iterate_t");
  PwlMap cur = map;
  for (int i = 2; i <= t; ++i) {
    try {
      cur = compose(map, cur, piece_budget);
    } catch (const BudgetError& e) {
      throw BudgetError("iterate_t: piece budget exceeded at iteration " + std::to_string(i),
                        i, e.pieces);
    }
  }
  return cur;
}

FixedPointSet fixed_points(const PwlMap& map) {
  const auto& bp = map.breakpoints();
  const auto& val = map.values();

  std::vector<double> pts;
  std::vector<Eigen::Index> segs;
  std::vector<bool> flags;
  auto emit = [&](double p, Eigen::Index s, bool tangent) {
    if (!pts.empty() && p - pts.back() <= kFixedPointDedupTol) {
      flags.back() = flags.back() || tangent;
      return;
    }
    pts.push_back(p);
    segs.push_back(s);
    flags.push_back(tangent);
  };

  for (Eigen::Index s = 0; s < map.piece_count(); ++s) {
    const double x0 = bp(s), x1 = bp(s + 1);
    const double v0 = val(s), v1 = val(s + 1);
    const double slope = (v1 - v0) / (x1 - x0);
    if (std::abs(slope - 1.0) <= kSlopeMergeTol) {
      // Piece parallel to the diagonal: a fixed point exists only in the
      // degenerate on-diagonal case, reported as flagged endpoints.
      if (std::abs(v0 - x0) <= kEvalTol && std::abs(v1 - x1) <= kEvalTol) {
        emit(x0, s, true);
        emit(x1, s, true);
      }
      continue;
    }
    const double xstar = (v0 - slope * x0) / (1.0 - slope);
    if (xstar >= x0 - kBreakpointDedupTol && xstar <= x1 + kBreakpointDedupTol)
      emit(std::clamp(xstar, x0, x1), s, false);
  }

  FixedPointSet out;
  out.points = to_vector(pts);
  out.segment_indices = std::move(segs);
  out.tangency_flags = std::move(flags);
  return out;
}

long count_regions(const PwlMap& map) {
  const auto& bp = map.breakpoints();
  const auto& val = map.values();
  long regions = 1;
  double prev = (val(1) - val(0)) / (bp(1) - bp(0));
  for (Eigen::Index s = 1; s < map.piece_count(); ++s) {
    const double cur = (val(s + 1) - val(s)) / (bp(s + 1) - bp(s));
    if (std::abs(cur - prev) > kSlopeMergeTol * std::max({1.0, std::abs(cur), std::abs(prev)}))
      ++regions;
    prev = cur;
  }
  return regions;
}

PwlMap scale(const PwlMap& map, double factor) {
  return PwlMap(map.breakpoints(), factor * map.values());
}

PwlMap add(const PwlMap& a, const PwlMap& b) {
  const auto& xa = a.breakpoints();
  const auto& xb = b.breakpoints();
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(xa.size() + xb.size()));
  Eigen::Index ia = 0, ib = 0;
  while (ia < xa.size() || ib < xb.size()) {
    double x;
    if (ib == xb.size() || (ia < xa.size() && xa(ia) <= xb(ib)))
      x = xa(ia++);
    else
      x = xb(ib++);
    if (xs.empty() || x - xs.back() > kBreakpointDedupTol) xs.push_back(x);
  }
  xs.back() = 1.0;
  std::vector<double> vs(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) vs[j] = a(xs[j]) + b(xs[j]);
  return build(std::move(xs), std::move(vs));
}

PwlMap add_constant(const PwlMap& map, double c) {
  return PwlMap(map.breakpoints(), map.values().array() + c);
}

PwlMap reference_triangle() {
  Eigen::VectorXd bp(3), v(3);
  bp << 0.0, 0.5, 1.0;
  v << 0.0, 1.0, 0.0;
  return PwlMap(std::move(bp), std::move(v));
}

}  // namespace chaoslab
