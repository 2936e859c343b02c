#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace chaoslab {

enum class HighDimBias { Zero, Uniform01 };

// d-dimensional recurrent map u -> relu(W u + bias) with W_ij ~ N(0, sigma^2/d).
// No clip by default: the high-dimensional experiments run plain ReLU layers,
// and the Jacobian analysis needs the raw map.
struct VectorRnn {
  int dim = 0;
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

VectorRnn sample_vector_rnn(int d, double sigma, std::uint64_t seed,
                            HighDimBias bias_kind = HighDimBias::Zero);

// Full state history (u_0, ..., u_t); per-neuron traces come from rows.
std::vector<Eigen::VectorXd> iterate_state(const VectorRnn& rnn, Eigen::VectorXd u0, int t);

struct JacobianResult {
  double spectral_norm = 0.0;
  int iterations_t = 0;
  int power_iteration_steps = 0;
  bool converged = false;
};

// Spectral norm of the input-output Jacobian of the t-step map at u0. The
// Jacobian is the ordered product of (D_s W) with D_s the 0/1 ReLU activity
// mask of step s; products are applied matrix-free in forward and transposed
// sweeps, so J is never materialized. ReLU derivative at an exactly-zero
// pre-activation is 0; if one is hit, u0 is shifted by 1e-12 once.
JacobianResult jacobian_spectral_norm(const VectorRnn& rnn, Eigen::VectorXd u0, int t,
                                      int max_steps = 200, double tol = 1e-8);

enum class IdxProjection { Truncate, GaussianRandom };

struct IdxData {
  std::vector<Eigen::VectorXd> vectors;
  std::uint32_t count = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::string projection;
  std::uint64_t projection_seed = 0;
};

// Reads an IDX image file (magic 0x00000803, big-endian dimensions), scales
// pixels to [0,1] and projects each flattened image to target_dim, either by
// truncation (zero-padded when target_dim exceeds the pixel count) or by a
// fixed seeded Gaussian projection. Throws FormatError with the byte offset
// of the offending field.
IdxData load_idx(const std::string& path, int target_dim,
                 IdxProjection projection = IdxProjection::Truncate,
                 std::uint64_t projection_seed = 0);

}  // namespace chaoslab
