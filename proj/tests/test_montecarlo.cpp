#include "chaoslab/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "chaoslab/errors.hpp"
#include "chaoslab/rng.hpp"
#include "doctest.h"

using namespace chaoslab;

namespace {

bool same_result(const SweepResult& a, const SweepResult& b) {
  return a.n_chaotic == b.n_chaotic && a.n_unreliable == b.n_unreliable &&
         a.n_fixed_point == b.n_fixed_point && a.p_hat == b.p_hat && a.ci_low == b.ci_low &&
         a.ci_high == b.ci_high && a.regime_label == b.regime_label;
}

}  // namespace

TEST_CASE("normal quantile hits the standard table values") {
  CHECK(std::abs(normal_quantile(0.975) - 1.959963984540054) <= 1e-9);
  CHECK(std::abs(normal_quantile(0.5)) <= 1e-12);
  CHECK(std::abs(normal_quantile(0.975) + normal_quantile(0.025)) <= 1e-12);
  CHECK(std::abs(normal_quantile(0.0013498980316301035) + 3.0) <= 1e-8);
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("wilson interval endpoints and symmetry") {
  const auto none = wilson_ci(0, 100, 0.95);
  CHECK(none.first == 0.0);
  CHECK(none.second > 0.0);
  const auto all = wilson_ci(100, 100, 0.95);
  CHECK(all.second == 1.0);
  const auto half = wilson_ci(50, 100, 0.95);
  CHECK(std::abs(0.5 * (half.first + half.second) - 0.5) <= 1e-12);
  const double halfwidth = 0.5 * (half.second - half.first);
  CHECK(halfwidth > 0.0955);
  CHECK(halfwidth < 0.0975);
  CHECK_THROWS_AS(wilson_ci(5, 0, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(wilson_ci(5, 4, 0.95), std::invalid_argument);
}

TEST_CASE("estimates are deterministic and order independent") {
  SweepConfig cfg;
  cfg.k = 32;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 300;
  cfg.master_seed = 17;
  const SweepResult a = estimate_chaos_probability(cfg);
  const SweepResult b = estimate_chaos_probability(cfg);
  CHECK(same_result(a, b));

  // Reversed manual execution reproduces the same tallies.
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.n_trials));
  for (long i = cfg.n_trials - 1; i >= 0; --i)
    outcomes[static_cast<std::size_t>(i)] =
        run_trial(cfg, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
  const SweepResult c = tally(cfg, outcomes);
  CHECK(same_result(a, c));
  CHECK(a.n_chaotic + a.n_unreliable <= cfg.n_trials);
  CHECK(a.ci_low <= a.p_hat);
  CHECK(a.p_hat <= a.ci_high);
}

TEST_CASE("screen-based estimates lower-bound the exact ones") {
  SweepConfig cfg;
  cfg.k = 128;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 400;
  cfg.master_seed = 2718;
  cfg.detector = Detector::Exact;
  const SweepResult exact = estimate_chaos_probability(cfg);
  cfg.detector = Detector::Screen;
  const SweepResult screen = estimate_chaos_probability(cfg);
  const double hw_exact = 0.5 * (exact.ci_high - exact.ci_low);
  const double hw_screen = 0.5 * (screen.ci_high - screen.ci_low);
  CHECK(screen.p_hat <= exact.p_hat + 2.0 * (hw_exact + hw_screen));
}

TEST_CASE("single-point sigma sweep equals a direct estimate") {
  SweepConfig cfg;
  cfg.k = 32;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 100;
  cfg.master_seed = 5;
  const auto swept = sweep_sigma(cfg, {2.0});
  REQUIRE(swept.size() == 1);
  SweepConfig direct = cfg;
  direct.scheme.sigma2 = 4.0;
  CHECK(same_result(swept[0], estimate_chaos_probability(direct)));
}

TEST_CASE("p_hat rises with sigma across the regimes") {
  SweepConfig cfg;
  cfg.k = 64;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 250;
  cfg.master_seed = 99;
  const auto results = sweep_sigma(cfg, {8.0, 0.3, 1.5});  // given unsorted on purpose
  REQUIRE(results.size() == 3);
  CHECK(results[0].config.scheme.sigma2 == doctest::Approx(0.09));
  for (std::size_t j = 0; j + 1 < results.size(); ++j) {
    const double slack = (results[j].ci_high - results[j].ci_low) +
                         (results[j + 1].ci_high - results[j + 1].ci_low);
    CHECK(results[j + 1].p_hat >= results[j].p_hat - slack);
  }
  CHECK(results[2].p_hat > results[0].p_hat);
}

TEST_CASE("blown piece budgets are excluded as unreliable, with counts") {
  SweepConfig cfg;
  cfg.k = 64;
  cfg.scheme = parse_scheme("he-normal");
  cfg.scheme.sigma2 = 32.0;  // strongly chaotic: f^3 wants many pieces
  cfg.n_trials = 60;
  cfg.master_seed = 4;
  cfg.piece_budget = 24;
  const SweepResult r = estimate_chaos_probability(cfg);
  CHECK(r.n_unreliable > 0);
  CHECK(r.n_chaotic + r.n_unreliable <= cfg.n_trials);
}

TEST_CASE("depth-2 trials run under both detectors") {
  SweepConfig cfg;
  cfg.architecture = Architecture::Depth2;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 150;
  cfg.master_seed = 11;
  cfg.detector = Detector::Exact;
  const SweepResult exact = estimate_chaos_probability(cfg);
  CHECK(exact.n_chaotic >= 0);

  cfg.detector = Detector::Numeric;
  cfg.numeric_grid = 20000;
  const SweepResult numeric = estimate_chaos_probability(cfg);
  const double slack = (exact.ci_high - exact.ci_low) + (numeric.ci_high - numeric.ci_low);
  CHECK(std::abs(numeric.p_hat - exact.p_hat) <= std::max(slack, 0.05));

  cfg.detector = Detector::Screen;
  CHECK_THROWS_AS(estimate_chaos_probability(cfg), ConfigError);

  cfg.detector = Detector::Exact;
  cfg.clipping = false;
  CHECK_THROWS_AS(estimate_chaos_probability(cfg), ConfigError);
}

TEST_CASE("configuration errors propagate") {
  SweepConfig cfg;
  cfg.n_trials = 0;
  CHECK_THROWS_AS(estimate_chaos_probability(cfg), ConfigError);
  cfg.n_trials = 10;
  cfg.scheme.sigma2 = 0.0;
  CHECK_THROWS_AS(estimate_chaos_probability(cfg), ConfigError);
  SweepConfig ok;
  CHECK_THROWS_AS(sweep_sigma(ok, {}), ConfigError);
  CHECK_THROWS_AS(sweep_sigma(ok, {1.0, -2.0}), ConfigError);
}

TEST_CASE("regime labels follow the variance thresholds") {
  const int k = 1024;
  CHECK(classify_regime(1.0 / (4.0 * k * std::log(k)), k) == "low-variance-order");
  CHECK(classify_regime(2.0 / k, k) == "edge-of-chaos");
  CHECK(classify_regime(std::sqrt(static_cast<double>(k)) / k, k) == "high-variance-chaos");
}
