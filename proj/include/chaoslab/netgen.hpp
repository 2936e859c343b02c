#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/pwl.hpp"

namespace chaoslab {

enum class WeightFamily {
  HeNormal,
  HeUniform,
  GlorotNormal,
  GlorotUniform,
  TruncatedNormal,
  CustomVariance,
};

enum class BiasRule { Uniform01, Zero, UniformSymmetric };

// How the weight variance depends on the layer width k:
//   Sigma2OverK   : sigma2 / k              (He-style; sigma2 configurable)
//   QuarterKLogK  : 1 / (4 k log k)         (the low-variance / order regime)
//   SigmaPowerK   : k^(2e) / k, sigma = k^e (the omega(1) / chaos regime)
enum class VarianceRule { Sigma2OverK, QuarterKLogK, SigmaPowerK };

struct InitScheme {
  WeightFamily family = WeightFamily::HeNormal;
  double sigma2 = 2.0;
  VarianceRule variance_rule = VarianceRule::Sigma2OverK;
  double sigma_exponent = 0.0;  // SigmaPowerK only
  BiasRule bias_rule = BiasRule::Uniform01;
  // Programmatic escape hatch: total weight variance as a function of fan-in.
  // Only honored for CustomVariance; not serializable.
  std::function<double(int)> variance_fn;

  // Total per-weight variance; Glorot variants use fan-in + fan-out, all
  // others ignore fan_out.
  double weight_variance(int fan_in, int fan_out = 1) const;
  double weight_stddev(int fan_in, int fan_out = 1) const;
};

// Named presets: he-normal, he-uniform, glorot-normal, glorot-uniform,
// truncated-normal, custom-variance. Throws ConfigError on unknown names.
InitScheme parse_scheme(const std::string& name);
std::string scheme_name(WeightFamily family);
std::string bias_rule_name(BiasRule rule);
BiasRule parse_bias_rule(const std::string& name);
std::string variance_rule_name(VarianceRule rule);
VarianceRule parse_variance_rule(const std::string& name);

// One draw from the shallow random family: weights a_i paired with sorted
// biases b_i in (0,1). Deterministic in (k, scheme, seed).
struct NetworkSample {
  int width = 0;
  Eigen::VectorXd weights;
  Eigen::VectorXd biases;  // strictly increasing order statistics
  InitScheme scheme;
  std::uint64_t seed = 0;
};

// The network values at its own bias points before clipping,
// y_i = sum_{l<i} a_l (b_i - b_l), plus the running accumulators that make
// the whole sequence linear-time.
struct YSequence {
  Eigen::VectorXd values;
  Eigen::VectorXd cumulative_weight;        // sum_{l<=i} a_l
  Eigen::VectorXd cumulative_weighted_bias;  // sum_{l<=i} a_l b_l
};

NetworkSample sample_network(int k, const InitScheme& scheme, std::uint64_t seed);
PwlMap build_map(const NetworkSample& sample);
YSequence y_sequence(const NetworkSample& sample);

// Shallow relu-sum parameters without the (0,1) bias restriction; what
// perturbation produces. Biases are kept sorted.
struct ReluNetwork {
  Eigen::VectorXd weights;
  Eigen::VectorXd biases;
};

// weights (2, -4), biases (0, 1/2): the triangle wave as a network.
ReluNetwork triangle_network();
PwlMap build_map(const ReluNetwork& net);
// The relu sum evaluated at an arbitrary real argument.
double evaluate_on_line(const ReluNetwork& net, double x);

enum class PerturbMode { Shared, IndependentPerLayer };

// Adds N(0, noise_stddev^2) to every weight and bias, one draw each.
ReluNetwork perturb(const ReluNetwork& net, double noise_stddev, std::uint64_t seed);

// The t unrolled layer networks: Shared reuses a single perturbation draw for
// every layer (the recurrent case), IndependentPerLayer draws fresh noise per
// layer (the feedforward case).
std::vector<ReluNetwork> perturb_unrolled(const ReluNetwork& net, double noise_stddev,
                                          int t, PerturbMode mode, std::uint64_t seed);

// layers[t-1] o ... o layers[0]. With clip_between, every layer is clipped to
// [0,1] before composing (feedback semantics); without it the raw sums flow
// through unchanged (feedforward semantics).
PwlMap compose_layers(const std::vector<ReluNetwork>& layers, bool clip_between = true,
                      long piece_budget = kDefaultPieceBudget);

enum class Activation { Relu, Tanh };
std::string activation_name(Activation a);
Activation parse_activation(const std::string& name);

// Width-2 -> width-1 architecture with unit hinges kept at their offsets:
// out = sum_j w2[j] * act(w1[j] * (x - b1[j])) + b2, optionally clipped.
struct Depth2Net {
  Eigen::Vector2d w1{0.0, 0.0};
  Eigen::Vector2d b1{0.0, 0.0};  // hinge offsets
  Eigen::Vector2d w2{0.0, 0.0};
  double b2 = 0.0;
  Activation activation = Activation::Relu;
  bool clip_output = true;
  InitScheme scheme;
  std::uint64_t seed = 0;
};

// Unit weights in the width-2 family carry a gain of 2 on top of the
// per-unit fan-in rule.
inline constexpr double kDepth2UnitGain = 2.0;

Depth2Net sample_depth2(const InitScheme& scheme, Activation activation, bool clip_output,
                        std::uint64_t seed);
// Hand-set parameters that reproduce the triangle wave exactly (relu path).
Depth2Net triangle_depth2();
double depth2_eval(const Depth2Net& net, double x);
// Exact piecewise-linear form; requires relu activation.
PwlMap depth2_pwl(const Depth2Net& net);

// Per-stage perturbation for the feedforward-vs-recurrent contrast.
Depth2Net perturb(const Depth2Net& net, double noise_stddev, std::uint64_t seed);
std::vector<Depth2Net> perturb_unrolled(const Depth2Net& net, double noise_stddev, int t,
                                        PerturbMode mode, std::uint64_t seed);

// stages[t-1] o ... o stages[0] for relu stages. clip_between clips each
// stage's output to [0,1] (the feedback model); otherwise the raw stage
// outputs flow through.
PwlMap compose_stages(const std::vector<Depth2Net>& stages, bool clip_between,
                      long piece_budget = kDefaultPieceBudget);

// Map handle: exact PwlMap for relu, numeric evaluation otherwise.
struct Depth2Map {
  Depth2Net net;
  std::optional<PwlMap> exact;
  double operator()(double x) const { return depth2_eval(net, x); }
};

Depth2Map build_depth2_map(const InitScheme& scheme, Activation activation, bool clip_output,
                           std::uint64_t seed);

}  // namespace chaoslab
