#include "chaoslab/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaoslab/errors.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

namespace {

// Standard deviation of a standard normal truncated to [-2, 2]; truncated
// draws are divided by this so the delivered variance matches the target.
double truncated2_stddev() {
  static const double value = [] {
    const double phi2 = std::exp(-2.0) / std::sqrt(2.0 * M_PI);
    const double mass = std::erf(2.0 / std::sqrt(2.0));
    return std::sqrt(1.0 - 4.0 * phi2 / mass);
  }();
  return value;
}

double draw_weight(Rng& rng, const InitScheme& scheme, double sd) {
  switch (scheme.family) {
    case WeightFamily::HeUniform:
    case WeightFamily::GlorotUniform: {
      const double limit = sd * std::sqrt(3.0);  // Var of U[-L,L] is L^2/3
      return (2.0 * rng.uniform() - 1.0) * limit;
    }
    case WeightFamily::TruncatedNormal: {
      double g;
      do {
        g = rng.gaussian();
      } while (std::abs(g) > 2.0);
      return g * (sd / truncated2_stddev());
    }
    default:
      return sd * rng.gaussian();
  }
}

double draw_bias(Rng& rng, BiasRule rule) {
  switch (rule) {
    case BiasRule::Uniform01:
      return rng.uniform();
    case BiasRule::Zero:
      return 0.0;
    case BiasRule::UniformSymmetric:
      return 2.0 * rng.uniform() - 1.0;
  }
  return 0.0;
}

void sort_by_bias(Eigen::VectorXd& weights, Eigen::VectorXd& biases) {
  const Eigen::Index k = biases.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return biases(a) < biases(b); });
  Eigen::VectorXd w(k), b(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    w(i) = weights(order[i]);
    b(i) = biases(order[i]);
  }
  weights.swap(w);
  biases.swap(b);
}

}  // namespace

double InitScheme::weight_variance(int fan_in, int fan_out) const {
  if (fan_in < 1) throw ConfigError("InitScheme: fan_in must be positive");
  switch (family) {
    case WeightFamily::GlorotNormal:
    case WeightFamily::GlorotUniform:
      return 2.0 / (static_cast<double>(fan_in) + static_cast<double>(fan_out));
    case WeightFamily::CustomVariance:
      if (variance_fn) {
        const double v = variance_fn(fan_in);
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("InitScheme: non-positive variance");
        return v;
      }
      break;
    default:
      break;
  }
  double v = 0.0;
  switch (variance_rule) {
    case VarianceRule::Sigma2OverK:
      v = sigma2 / fan_in;
      break;
    case VarianceRule::QuarterKLogK:
      if (fan_in < 2) throw ConfigError("InitScheme: 1/(4k log k) rule needs k >= 2");
      v = 1.0 / (4.0 * fan_in * std::log(static_cast<double>(fan_in)));
      break;
    case VarianceRule::SigmaPowerK: {
      const double sigma = std::pow(static_cast<double>(fan_in), sigma_exponent);
      v = sigma * sigma / fan_in;
      break;
    }
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("InitScheme: non-positive variance");
  return v;
}

double InitScheme::weight_stddev(int fan_in, int fan_out) const {
  return std::sqrt(weight_variance(fan_in, fan_out));
}

InitScheme parse_scheme(const std::string& name) {
  InitScheme s;
  if (name == "he-normal") {
    s.family = WeightFamily::HeNormal;
  } else if (name == "he-uniform") {
    s.family = WeightFamily::HeUniform;
  } else if (name == "glorot-normal") {
    s.family = WeightFamily::GlorotNormal;
  } else if (name == "glorot-uniform") {
    s.family = WeightFamily::GlorotUniform;
  } else if (name == "truncated-normal") {
    s.family = WeightFamily::TruncatedNormal;
  } else if (name == "custom-variance") {
    s.family = WeightFamily::CustomVariance;
  } else {
    throw ConfigError("unknown initialization scheme: " + name);
  }
  return s;
}

std::string scheme_name(WeightFamily family) {
  switch (family) {
    case WeightFamily::HeNormal:
      return "he-normal";
    case WeightFamily::HeUniform:
      return "he-uniform";
    case WeightFamily::GlorotNormal:
      return "glorot-normal";
    case WeightFamily::GlorotUniform:
      return "glorot-uniform";
    case WeightFamily::TruncatedNormal:
      return "truncated-normal";
    case WeightFamily::CustomVariance:
      return "custom-variance";
  }
  return "?";
}

std::string bias_rule_name(BiasRule rule) {
  switch (rule) {
    case BiasRule::Uniform01:
      return "uniform-0-1";
    case BiasRule::Zero:
      return "zero";
    case BiasRule::UniformSymmetric:
      return "uniform-symmetric";
  }
  return "?";
}

BiasRule parse_bias_rule(const std::string& name) {
  if (name == "uniform-0-1") return BiasRule::Uniform01;
  if (name == "zero") return BiasRule::Zero;
  if (name == "uniform-symmetric") return BiasRule::UniformSymmetric;
  throw ConfigError("unknown bias rule: " + name);
}

std::string variance_rule_name(VarianceRule rule) {
  switch (rule) {
    case VarianceRule::Sigma2OverK:
      return "sigma2-over-k";
    case VarianceRule::QuarterKLogK:
      return "quarter-k-log-k";
    case VarianceRule::SigmaPowerK:
      return "sigma-power-k";
  }
  return "?";
}

VarianceRule parse_variance_rule(const std::string& name) {
  if (name == "sigma2-over-k") return VarianceRule::Sigma2OverK;
  if (name == "quarter-k-log-k") return VarianceRule::QuarterKLogK;
  if (name == "sigma-power-k") return VarianceRule::SigmaPowerK;
  throw ConfigError("unknown variance rule: " + name);
}

NetworkSample sample_network(int k, const InitScheme& scheme, std::uint64_t seed) {
  if (k < 1) throw ConfigError("sample_network: width must be positive");
  if (scheme.bias_rule != BiasRule::Uniform01)
    throw ConfigError("sample_network: the shallow family requires uniform-0-1 biases");
  const double sd = scheme.weight_stddev(k);  // validates the variance

  Rng rng(seed);
  NetworkSample out;
  out.width = k;
  out.scheme = scheme;
  out.seed = seed;

  out.biases.resize(k);
  for (;;) {
    for (int i = 0; i < k; ++i) out.biases(i) = rng.uniform_open();
    std::sort(out.biases.data(), out.biases.data() + k);
    // Exact ties or endpoint hits are probability-zero events; redraw so the
    // strict-order invariant holds.
    bool strict = out.biases(0) > 0.0 && out.biases(k - 1) < 1.0;
    for (int i = 1; strict && i < k; ++i) strict = out.biases(i) > out.biases(i - 1);
    if (strict) break;
  }

  out.weights.resize(k);
  for (int i = 0; i < k; ++i) out.weights(i) = draw_weight(rng, scheme, sd);
  return out;
}

PwlMap build_map(const NetworkSample& sample) {
  return clip_apply(from_relu_sum(sample.weights, sample.biases));
}

YSequence y_sequence(const NetworkSample& sample) {
  const int k = sample.width;
  YSequence out;
  out.values.resize(k);
  out.cumulative_weight.resize(k);
  out.cumulative_weighted_bias.resize(k);
  double weight_sum = 0.0, weighted_bias_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    out.values(i) = weight_sum * sample.biases(i) - weighted_bias_sum;
    weight_sum += sample.weights(i);
    weighted_bias_sum += sample.weights(i) * sample.biases(i);
    out.cumulative_weight(i) = weight_sum;
    out.cumulative_weighted_bias(i) = weighted_bias_sum;
  }
  return out;
}

ReluNetwork triangle_network() {
  ReluNetwork net;
  net.weights.resize(2);
  net.biases.resize(2);
  net.weights << 2.0, -4.0;
  net.biases << 0.0, 0.5;
  return net;
}

PwlMap build_map(const ReluNetwork& net) {
  return clip_apply(from_relu_sum_general(net.weights, net.biases));
}

double evaluate_on_line(const ReluNetwork& net, double x) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < net.weights.size(); ++i)
    out += net.weights(i) * std::max(x - net.biases(i), 0.0);
  return out;
}

ReluNetwork perturb(const ReluNetwork& net, double noise_stddev, std::uint64_t seed) {
  if (noise_stddev < 0.0) throw ConfigError("perturb: noise stddev must be nonnegative");
  Rng rng(seed);
  ReluNetwork out = net;
  for (Eigen::Index i = 0; i < out.weights.size(); ++i)
    out.weights(i) += noise_stddev * rng.gaussian();
  for (Eigen::Index i = 0; i < out.biases.size(); ++i)
    out.biases(i) += noise_stddev * rng.gaussian();
  sort_by_bias(out.weights, out.biases);
  return out;
}

std::vector<ReluNetwork> perturb_unrolled(const ReluNetwork& net, double noise_stddev, int t,
                                          PerturbMode mode, std::uint64_t seed) {
  if (t < 1) throw ConfigError("perturb_unrolled: t must be >= 1");
  std::vector<ReluNetwork> layers;
  layers.reserve(static_cast<std::size_t>(t));
  if (mode == PerturbMode::Shared) {
    layers.assign(static_cast<std::size_t>(t), perturb(net, noise_stddev, seed));
  } else {
    for (int j = 0; j < t; ++j)
      layers.push_back(perturb(net, noise_stddev, derive_seed(seed, static_cast<std::uint64_t>(j))));
  }
  return layers;
}

PwlMap compose_layers(const std::vector<ReluNetwork>& layers, bool clip_between,
                      long piece_budget) {
  if (layers.empty()) throw ConfigError("compose_layers: no layers");
  if (clip_between) {
    PwlMap cur = build_map(layers[0]);
    for (std::size_t j = 1; j < layers.size(); ++j)
      cur = compose(build_map(layers[j]), cur, piece_budget);
    return cur;
  }
  PwlMap cur = from_relu_sum_general(layers[0].weights, layers[0].biases);
  for (std::size_t j = 1; j < layers.size(); ++j) {
    const ReluNetwork& layer = layers[j];
    Eigen::VectorXd hinges = layer.biases;
    std::sort(hinges.data(), hinges.data() + hinges.size());
    cur = compose_unbounded([&layer](double v) { return evaluate_on_line(layer, v); }, hinges,
                            cur, piece_budget);
  }
  return cur;
}

std::string activation_name(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation: " + name);
}

Depth2Net sample_depth2(const InitScheme& scheme, Activation activation, bool clip_output,
                        std::uint64_t seed) {
  Rng rng(seed);
  Depth2Net net;
  net.activation = activation;
  net.clip_output = clip_output;
  net.scheme = scheme;
  net.seed = seed;
  const double sd = kDepth2UnitGain * scheme.weight_stddev(1, 1);
  for (int j = 0; j < 2; ++j) net.w1(j) = draw_weight(rng, scheme, sd);
  for (int j = 0; j < 2; ++j) net.b1(j) = draw_bias(rng, scheme.bias_rule);
  for (int j = 0; j < 2; ++j) net.w2(j) = draw_weight(rng, scheme, sd);
  net.b2 = draw_bias(rng, scheme.bias_rule);
  return net;
}

Depth2Net triangle_depth2() {
  Depth2Net net;
  net.w1 << 1.0, 1.0;
  net.b1 << 0.0, 0.5;
  net.w2 << 2.0, -4.0;
  net.b2 = 0.0;
  net.activation = Activation::Relu;
  net.clip_output = true;
  return net;
}

double depth2_eval(const Depth2Net& net, double x) {
  auto act = [&](double z) {
    return net.activation == Activation::Relu ? std::max(z, 0.0) : std::tanh(z);
  };
  const double h0 = act(net.w1(0) * (x - net.b1(0)));
  const double h1 = act(net.w1(1) * (x - net.b1(1)));
  double out = net.w2(0) * h0 + net.w2(1) * h1 + net.b2;
  if (net.clip_output) out = std::clamp(out, 0.0, 1.0);
  return out;
}

PwlMap depth2_pwl(const Depth2Net& net) {
  if (net.activation != Activation::Relu)
    throw std::invalid_argument("depth2_pwl: exact construction requires relu");
  auto hinge = [](double w, double b) {
    Eigen::VectorXd bp(2), v(2);
    bp << 0.0, 1.0;
    v << w * (0.0 - b), w * (1.0 - b);
    return relu_apply(PwlMap(std::move(bp), std::move(v)));
  };
  PwlMap out = add_constant(
      add(scale(hinge(net.w1(0), net.b1(0)), net.w2(0)),
          scale(hinge(net.w1(1), net.b1(1)), net.w2(1))),
      net.b2);
  if (net.clip_output) out = clip_apply(out);
  return out;
}

Depth2Map build_depth2_map(const InitScheme& scheme, Activation activation, bool clip_output,
                           std::uint64_t seed) {
  Depth2Map handle;
  handle.net = sample_depth2(scheme, activation, clip_output, seed);
  if (activation == Activation::Relu) handle.exact = depth2_pwl(handle.net);
  return handle;
}

Depth2Net perturb(const Depth2Net& net, double noise_stddev, std::uint64_t seed) {
  if (noise_stddev < 0.0) throw ConfigError("perturb: noise stddev must be nonnegative");
  if (noise_stddev == 0.0) return net;
  // Noise lands on the affine unit coordinates (gain w, offset c = -w*b); the
  // perturbed hinge is -c'/w'.
  Rng rng(seed);
  Depth2Net out = net;
  for (int j = 0; j < 2; ++j) {
    double w = net.w1(j);
    double c = -net.w1(j) * net.b1(j);
    w += noise_stddev * rng.gaussian();
    c += noise_stddev * rng.gaussian();
    out.w1(j) = w;
    out.b1(j) = w != 0.0 ? -c / w : net.b1(j);
  }
  for (int j = 0; j < 2; ++j) out.w2(j) += noise_stddev * rng.gaussian();
  out.b2 += noise_stddev * rng.gaussian();
  return out;
}

std::vector<Depth2Net> perturb_unrolled(const Depth2Net& net, double noise_stddev, int t,
                                        PerturbMode mode, std::uint64_t seed) {
  if (t < 1) throw ConfigError("perturb_unrolled: t must be >= 1");
  std::vector<Depth2Net> stages;
  stages.reserve(static_cast<std::size_t>(t));
  if (mode == PerturbMode::Shared) {
    stages.assign(static_cast<std::size_t>(t), perturb(net, noise_stddev, seed));
  } else {
    for (int j = 0; j < t; ++j)
      stages.push_back(perturb(net, noise_stddev, derive_seed(seed, static_cast<std::uint64_t>(j))));
  }
  return stages;
}

PwlMap compose_stages(const std::vector<Depth2Net>& stages, bool clip_between,
                      long piece_budget) {
  if (stages.empty()) throw ConfigError("compose_stages: no stages");
  for (const Depth2Net& s : stages)
    if (s.activation != Activation::Relu)
      throw std::invalid_argument("compose_stages: exact composition requires relu stages");
  auto stage_map = [&](const Depth2Net& s) {
    Depth2Net copy = s;
    copy.clip_output = clip_between;
    return depth2_pwl(copy);
  };
  PwlMap cur = stage_map(stages[0]);
  for (std::size_t j = 1; j < stages.size(); ++j) {
    if (clip_between) {
      cur = compose(stage_map(stages[j]), cur, piece_budget);
    } else {
      const Depth2Net& s = stages[j];
      Eigen::Vector2d h = s.b1;
      Eigen::VectorXd hinges(2);
      hinges << std::min(h(0), h(1)), std::max(h(0), h(1));
      Depth2Net raw = s;
      raw.clip_output = false;
      cur = compose_unbounded([raw](double v) { return depth2_eval(raw, v); }, hinges, cur,
                              piece_budget);
    }
  }
  return cur;
}

}  // namespace chaoslab
