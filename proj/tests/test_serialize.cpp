#include "chaoslab/serialize.hpp"

#include "chaoslab/errors.hpp"
#include "chaoslab/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chaoslab;

TEST_CASE("PwlMap JSON round trip is bit exact") {
  Eigen::VectorXd bp(5), vals(5);
  bp << 0.0, 1.0 / 3.0, 0.5000000000000001, 0.7, 1.0;
  vals << 1e-300, 0.1, -2.0 / 3.0, 1.0 - 1e-16, 0.3333333333333333;
  const PwlMap m(bp, vals);
  const std::string text = to_json(m).dump();
  const PwlMap back = pwl_from_json(json::parse(text));
  CHECK(back.breakpoints() == m.breakpoints());
  CHECK(back.values() == m.values());

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const PwlMap r = testing::random_unit_pwl(rng, 12);
    const PwlMap rb = pwl_from_json(json::parse(to_json(r).dump()));
    CHECK(rb.breakpoints() == r.breakpoints());
    CHECK(rb.values() == r.values());
  }
}

TEST_CASE("scheme JSON round trip") {
  InitScheme s = parse_scheme("truncated-normal");
  s.sigma2 = 3.5;
  s.variance_rule = VarianceRule::SigmaPowerK;
  s.sigma_exponent = 0.25;
  s.bias_rule = BiasRule::Uniform01;
  const InitScheme back = scheme_from_json(to_json(s));
  CHECK(back.family == s.family);
  CHECK(back.sigma2 == s.sigma2);
  CHECK(back.variance_rule == s.variance_rule);
  CHECK(back.sigma_exponent == s.sigma_exponent);
  CHECK(back.bias_rule == s.bias_rule);
  CHECK(to_json(s)["truncation"] == "2sigma-rescaled");
  CHECK_THROWS_AS(scheme_from_json(json{{"name", "nope"}}), ConfigError);
}

TEST_CASE("verdict and sweep rows carry the audit fields") {
  const ChaosVerdict v = detect_period3_exact(reference_triangle());
  const json line = verdict_json(v, 7, 2, "reference-triangle");
  for (const char* key : {"seed", "k", "scheme", "method", "is_period3", "n_fp_f", "n_fp_f3",
                          "cycle", "screen_fired", "reliable"})
    CHECK(line.contains(key));
  CHECK(line["is_period3"] == true);
  CHECK(line["n_fp_f3"] == 8);
  CHECK(line["cycle"].is_array());

  SweepConfig cfg;
  cfg.k = 16;
  cfg.scheme = parse_scheme("he-normal");
  cfg.n_trials = 20;
  cfg.master_seed = 3;
  const SweepResult r = estimate_chaos_probability(cfg);
  const json row = to_json(r);
  for (const char* key :
       {"config", "n_chaotic", "n_unreliable", "n_fixed_point", "p_hat", "ci_low", "ci_high"})
    CHECK(row.contains(key));
  CHECK(row["config"]["master_seed"] == 3);
}

TEST_CASE("malformed map JSON is rejected by construction validation") {
  CHECK_THROWS_AS(pwl_from_json(json::parse(R"({"breakpoints":[0.0,0.5],"values":[1.0]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(pwl_from_json(json::parse(R"({"breakpoints":[0.1,1.0],"values":[0.0,1.0]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      pwl_from_json(json::parse(R"({"breakpoints":[0.0,0.5,0.5,1.0],"values":[0,1,1,0]})")),
      std::invalid_argument);
}

TEST_CASE("network sample audit serialization") {
  const NetworkSample s = sample_network(8, parse_scheme("he-normal"), 123);
  const json j = to_json(s);
  CHECK(j["k"] == 8);
  CHECK(j["seed"] == 123);
  CHECK(j["weights"].size() == 8);
  CHECK(j["biases"].size() == 8);
  CHECK(j["scheme"]["name"] == "he-normal");
}
