#include "chaoslab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

std::string architecture_name(Architecture a) {
  return a == Architecture::Shallow ? "shallow" : "depth2";
}

Architecture parse_architecture(const std::string& name) {
  if (name == "shallow") return Architecture::Shallow;
  if (name == "depth2") return Architecture::Depth2;
  throw ConfigError("unknown architecture: " + name);
}

std::string detector_name(Detector d) {
  switch (d) {
    case Detector::Exact:
      return "exact";
    case Detector::Screen:
      return "screen";
    case Detector::Numeric:
      return "numeric";
  }
  return "?";
}

Detector parse_detector(const std::string& name) {
  if (name == "exact") return Detector::Exact;
  if (name == "screen") return Detector::Screen;
  if (name == "numeric") return Detector::Numeric;
  throw ConfigError("unknown detector: " + name);
}

namespace {

TrialClass from_verdict(const ChaosVerdict& v) {
  if (!v.reliable) return TrialClass::Unreliable;
  return v.is_period3 ? TrialClass::Chaotic : TrialClass::NotChaotic;
}

TrialOutcome run_shallow_trial(const SweepConfig& cfg, std::uint64_t trial_seed) {
  TrialOutcome out;
  const NetworkSample sample = sample_network(cfg.k, cfg.scheme, trial_seed);
  const PwlMap map = build_map(sample);
  out.nonzero_fixed_point = has_nonzero_fixed_point(map);
  switch (cfg.detector) {
    case Detector::Screen:
      out.cls = screen_period3(y_sequence(sample)) ? TrialClass::Chaotic : TrialClass::NotChaotic;
      break;
    case Detector::Exact:
      try {
        out.cls = from_verdict(detect_period3_exact(map, cfg.piece_budget));
      } catch (const BudgetError&) {
        out.cls = TrialClass::Unreliable;
      }
      break;
    case Detector::Numeric:
      out.cls = from_verdict(
          detect_period3_numeric([&map](double x) { return map(x); }, cfg.numeric_grid));
      break;
  }
  return out;
}

TrialOutcome run_depth2_trial(const SweepConfig& cfg, std::uint64_t trial_seed) {
  TrialOutcome out;
  const Depth2Map handle = build_depth2_map(cfg.scheme, cfg.activation, cfg.clipping, trial_seed);
  if (cfg.detector == Detector::Screen)
    throw ConfigError("screen detector applies to the shallow family only");
  if (cfg.detector == Detector::Exact) {
    if (!handle.exact || !cfg.clipping)
      throw ConfigError("exact detector needs a clipped relu depth-2 map; use numeric");
    try {
      out.cls = from_verdict(detect_period3_exact(*handle.exact, cfg.piece_budget));
    } catch (const BudgetError&) {
      out.cls = TrialClass::Unreliable;
    }
    return out;
  }
  out.cls = from_verdict(detect_period3_numeric(
      [&handle](double x) { return handle(x); }, cfg.numeric_grid));
  return out;
}

}  // namespace

TrialOutcome run_trial(const SweepConfig& config, std::uint64_t trial_seed) {
  return config.architecture == Architecture::Shallow ? run_shallow_trial(config, trial_seed)
                                                      : run_depth2_trial(config, trial_seed);
}

SweepResult tally(const SweepConfig& config, const std::vector<TrialOutcome>& outcomes) {
  SweepResult res;
  res.config = config;
  for (const TrialOutcome& o : outcomes) {
    if (o.cls == TrialClass::Chaotic) ++res.n_chaotic;
    if (o.cls == TrialClass::Unreliable) ++res.n_unreliable;
    if (o.nonzero_fixed_point) ++res.n_fixed_point;
  }
  const long reliable = static_cast<long>(outcomes.size()) - res.n_unreliable;
  if (reliable > 0) {
    res.p_hat = static_cast<double>(res.n_chaotic) / static_cast<double>(reliable);
    const auto ci = wilson_ci(res.n_chaotic, reliable, 0.95);
    res.ci_low = ci.first;
    res.ci_high = ci.second;
  } else {
    res.p_hat = 0.0;
    res.ci_low = 0.0;
    res.ci_high = 1.0;
  }
  const int fan_in = config.architecture == Architecture::Shallow ? config.k : 1;
  res.regime_label = classify_regime(config.scheme.weight_variance(fan_in), config.k);
  return res;
}

SweepResult estimate_chaos_probability(const SweepConfig& config) {
  if (config.n_trials < 1) throw ConfigError("estimate_chaos_probability: n_trials must be >= 1");
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.n_trials));
  parallel_for(config.n_trials, [&](long i) {
    outcomes[static_cast<std::size_t>(i)] =
        run_trial(config, derive_seed(config.master_seed, static_cast<std::uint64_t>(i)));
  });
  return tally(config, outcomes);
}

std::vector<SweepResult> sweep_sigma(const SweepConfig& base, std::vector<double> sigma_grid) {
  if (sigma_grid.empty()) throw ConfigError("sweep_sigma: empty sigma grid");
  for (double s : sigma_grid)
    if (!(s > 0.0)) throw ConfigError("sweep_sigma: sigma values must be positive");
  std::sort(sigma_grid.begin(), sigma_grid.end());
  std::vector<SweepResult> out;
  out.reserve(sigma_grid.size());
  for (double sigma : sigma_grid) {
    SweepConfig cfg = base;
    cfg.scheme.variance_rule = VarianceRule::Sigma2OverK;
    cfg.scheme.sigma2 = sigma * sigma;
    out.push_back(estimate_chaos_probability(cfg));
  }
  return out;
}

std::pair<double, double> wilson_ci(long successes, long trials, double level) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::invalid_argument("wilson_ci: need 0 <= successes <= trials, trials >= 1");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("wilson_ci: level must lie in (0,1)");
  const double z = normal_quantile(0.5 + level / 2.0);
  const double n = static_cast<double>(trials);
  const double ph = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (ph + z2 / (2.0 * n)) / denom;
  const double halfwidth = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
  // The interval always contains the point estimate; at the boundaries the
  // exact endpoint is 0 or 1, not a rounding residue.
  const double low = successes == 0 ? 0.0 : std::clamp(center - halfwidth, 0.0, 1.0);
  const double high = successes == trials ? 1.0 : std::clamp(center + halfwidth, 0.0, 1.0);
  return {low, high};
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0,1)");
  // Acklam's rational approximation, |relative error| < 1.15e-9.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement against the exact CDF brings this to ~1e-15.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

std::string classify_regime(double weight_variance, int k) {
  const double sigma2 = weight_variance * k;
  const double low_threshold = 1.0 / (4.0 * std::log(std::max(2, k)));
  if (sigma2 <= low_threshold * (1.0 + 1e-9)) return "low-variance-order";
  if (sigma2 <= 4.0) return "edge-of-chaos";
  return "high-variance-chaos";
}

}  // namespace chaoslab
