#pragma once

#include <string>

#include "chaoslab/chaos.hpp"
#include "chaoslab/montecarlo.hpp"
#include "chaoslab/netgen.hpp"
#include "chaoslab/pwl.hpp"

#include "json.hpp"

namespace chaoslab {

using json = nlohmann::json;

// {breakpoints, values}; nlohmann prints shortest round-trip decimals, so the
// round trip is bit-exact for finite doubles.
inline json to_json(const PwlMap& map) {
  json j;
  j["breakpoints"] = std::vector<double>(map.breakpoints().begin(), map.breakpoints().end());
  j["values"] = std::vector<double>(map.values().begin(), map.values().end());
  return j;
}

inline PwlMap pwl_from_json(const json& j) {
  const auto bp = j.at("breakpoints").get<std::vector<double>>();
  const auto vals = j.at("values").get<std::vector<double>>();
  return PwlMap(Eigen::Map<const Eigen::VectorXd>(bp.data(), static_cast<Eigen::Index>(bp.size())),
                Eigen::Map<const Eigen::VectorXd>(vals.data(),
                                                  static_cast<Eigen::Index>(vals.size())));
}

inline json to_json(const InitScheme& s) {
  json j;
  j["name"] = scheme_name(s.family);
  j["sigma2"] = s.sigma2;
  j["variance_rule"] = variance_rule_name(s.variance_rule);
  j["sigma_exponent"] = s.sigma_exponent;
  j["bias_rule"] = bias_rule_name(s.bias_rule);
  j["truncation"] = s.family == WeightFamily::TruncatedNormal ? "2sigma-rescaled" : "none";
  return j;
}

inline InitScheme scheme_from_json(const json& j) {
  InitScheme s = parse_scheme(j.at("name").get<std::string>());
  if (j.contains("sigma2")) s.sigma2 = j.at("sigma2").get<double>();
  if (j.contains("variance_rule"))
    s.variance_rule = parse_variance_rule(j.at("variance_rule").get<std::string>());
  if (j.contains("sigma_exponent")) s.sigma_exponent = j.at("sigma_exponent").get<double>();
  if (j.contains("bias_rule")) s.bias_rule = parse_bias_rule(j.at("bias_rule").get<std::string>());
  return s;
}

inline json to_json(const NetworkSample& sample) {
  json j;
  j["k"] = sample.width;
  j["scheme"] = to_json(sample.scheme);
  j["seed"] = sample.seed;
  j["weights"] = std::vector<double>(sample.weights.begin(), sample.weights.end());
  j["biases"] = std::vector<double>(sample.biases.begin(), sample.biases.end());
  return j;
}

// One JSON line per classified trial.
inline json verdict_json(const ChaosVerdict& v, std::uint64_t seed, int k,
                         const std::string& scheme) {
  json j;
  j["seed"] = seed;
  j["k"] = k;
  j["scheme"] = scheme;
  j["method"] = v.method == DetectionMethod::ExactPwl ? "exact-pwl" : "numeric";
  j["is_period3"] = v.is_period3;
  j["n_fp_f"] = v.fixed_points_f.count();
  j["n_fp_f3"] = v.fixed_points_f3.count();
  if (v.cycle)
    j["cycle"] = {(*v.cycle)[0], (*v.cycle)[1], (*v.cycle)[2]};
  else
    j["cycle"] = nullptr;
  j["screen_fired"] = v.screen_fired;
  j["reliable"] = v.reliable;
  if (v.method == DetectionMethod::Numeric) j["grid_size"] = v.grid_size;
  return j;
}

inline json to_json(const SweepConfig& c) {
  json j;
  j["architecture"] = architecture_name(c.architecture);
  j["k"] = c.k;
  j["scheme"] = to_json(c.scheme);
  j["activation"] = activation_name(c.activation);
  j["clipping"] = c.clipping;
  j["detector"] = detector_name(c.detector);
  j["n_trials"] = c.n_trials;
  j["master_seed"] = c.master_seed;
  j["piece_budget"] = c.piece_budget;
  j["numeric_grid"] = c.numeric_grid;
  return j;
}

inline json to_json(const SweepResult& r) {
  json j;
  j["config"] = to_json(r.config);
  j["n_chaotic"] = r.n_chaotic;
  j["n_unreliable"] = r.n_unreliable;
  j["n_fixed_point"] = r.n_fixed_point;
  j["p_hat"] = r.p_hat;
  j["ci_low"] = r.ci_low;
  j["ci_high"] = r.ci_high;
  j["regime"] = r.regime_label;
  return j;
}

}  // namespace chaoslab
