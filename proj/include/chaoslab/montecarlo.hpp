#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/netgen.hpp"

namespace chaoslab {

enum class Architecture { Shallow, Depth2 };
enum class Detector { Exact, Screen, Numeric };

std::string architecture_name(Architecture a);
Architecture parse_architecture(const std::string& name);
std::string detector_name(Detector d);
Detector parse_detector(const std::string& name);

struct SweepConfig {
  Architecture architecture = Architecture::Shallow;
  int k = 64;
  InitScheme scheme;
  Activation activation = Activation::Relu;  // depth-2 only
  bool clipping = true;                      // depth-2 only
  Detector detector = Detector::Exact;
  long n_trials = 10000;
  std::uint64_t master_seed = 0;
  long piece_budget = 1'000'000;
  long numeric_grid = 100'000;
};

// One Monte Carlo estimate of P(period 3). Trials whose verdict is unreliable
// (tangency, ambiguous matching, blown piece budget) are excluded from both
// the numerator and the denominator; their count is reported so the exclusion
// is auditable. The interval is Wilson at 95% over the reliable trials.
struct SweepResult {
  SweepConfig config;
  long n_chaotic = 0;
  long n_unreliable = 0;
  long n_fixed_point = 0;  // shallow trials with a fixed point in (0,1]
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::string regime_label;
};

enum class TrialClass : unsigned char { NotChaotic, Chaotic, Unreliable };

struct TrialOutcome {
  TrialClass cls = TrialClass::NotChaotic;
  bool nonzero_fixed_point = false;
};

// Single trial, exposed so order-independence can be exercised directly.
TrialOutcome run_trial(const SweepConfig& config, std::uint64_t trial_seed);

// Aggregation helper shared by estimate_chaos_probability and tests.
SweepResult tally(const SweepConfig& config, const std::vector<TrialOutcome>& outcomes);

// Runs config.n_trials trials seeded as derive_seed(master_seed, i). The
// result is identical no matter how trials are scheduled.
SweepResult estimate_chaos_probability(const SweepConfig& config);

// One estimate per sigma in ascending order, holding everything else (and the
// per-trial seeds) fixed; weight variance at each point is sigma^2 / k.
std::vector<SweepResult> sweep_sigma(const SweepConfig& base,
                                     std::vector<double> sigma_grid);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_ci(long successes, long trials, double level);

// Inverse standard normal CDF (Acklam's approximation plus one Halley step).
double normal_quantile(double p);

// Annotation only: which variance regime (k, total weight variance) falls in.
std::string classify_regime(double weight_variance, int k);

}  // namespace chaoslab
