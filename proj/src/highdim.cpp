#include "chaoslab/highdim.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "chaoslab/errors.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

VectorRnn sample_vector_rnn(int d, double sigma, std::uint64_t seed, HighDimBias bias_kind) {
  if (d < 1) throw ConfigError("sample_vector_rnn: dimension must be positive");
  if (!(sigma > 0.0)) throw ConfigError("sample_vector_rnn: sigma must be positive");
  Rng rng(seed);
  VectorRnn rnn;
  rnn.dim = d;
  rnn.sigma = sigma;
  rnn.seed = seed;
  const double sd = sigma / std::sqrt(static_cast<double>(d));
  rnn.weight.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rnn.weight(i, j) = sd * rng.gaussian();
  rnn.bias.resize(d);
  for (int i = 0; i < d; ++i)
    rnn.bias(i) = bias_kind == HighDimBias::Zero ? 0.0 : rng.uniform();
  return rnn;
}

std::vector<Eigen::VectorXd> iterate_state(const VectorRnn& rnn, Eigen::VectorXd u0, int t) {
  if (t < 1) throw std::invalid_argument("iterate_state: t must be >= 1");
  if (u0.size() != rnn.dim) throw std::invalid_argument("iterate_state: state dimension mismatch");
  std::vector<Eigen::VectorXd> states;
  states.reserve(static_cast<std::size_t>(t) + 1);
  states.push_back(u0);
  Eigen::VectorXd u = std::move(u0);
  for (int s = 0; s < t; ++s) {
    u = (rnn.weight * u + rnn.bias).cwiseMax(0.0);
    states.push_back(u);
  }
  return states;
}

JacobianResult jacobian_spectral_norm(const VectorRnn& rnn, Eigen::VectorXd u0, int t,
                                      int max_steps, double tol) {
  if (t < 1) throw std::invalid_argument("jacobian_spectral_norm: t must be >= 1");
  if (u0.size() != rnn.dim)
    throw std::invalid_argument("jacobian_spectral_norm: state dimension mismatch");

  const int d = rnn.dim;
  std::vector<Eigen::ArrayXd> masks(static_cast<std::size_t>(t));
  // Exactly-zero pre-activations sit on the mask boundary; retry once from a
  // minutely shifted start.
  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::VectorXd u = u0;
    bool boundary = false;
    for (int s = 0; s < t; ++s) {
      const Eigen::VectorXd z = rnn.weight * u + rnn.bias;
      if ((z.array() == 0.0).any()) boundary = true;
      masks[static_cast<std::size_t>(s)] = (z.array() > 0.0).cast<double>();
      u = z.cwiseMax(0.0);
    }
    if (!boundary || attempt == 1) break;
    u0.array() += 1e-12;
  }

  auto forward = [&](Eigen::VectorXd v) {
    for (int s = 0; s < t; ++s)
      v = (masks[static_cast<std::size_t>(s)] * (rnn.weight * v).array()).matrix();
    return v;
  };
  auto transposed = [&](Eigen::VectorXd v) {
    for (int s = t - 1; s >= 0; --s)
      v = rnn.weight.transpose() * (masks[static_cast<std::size_t>(s)] * v.array()).matrix();
    return v;
  };

  JacobianResult res;
  res.iterations_t = t;

  Rng rng(derive_seed(rnn.seed, 0x9d2c5680u));
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = rng.gaussian();
  const double vn = v.norm();
  if (vn == 0.0)
    v.setUnit(0);
  else
    v /= vn;

  double prev = -1.0;
  for (int step = 1; step <= max_steps; ++step) {
    res.power_iteration_steps = step;
    const Eigen::VectorXd w = forward(v);
    const double est = w.norm();
    res.spectral_norm = est;
    if (est == 0.0) {  // v (or the whole range) is annihilated
      res.converged = true;
      return res;
    }
    if (prev >= 0.0 && std::abs(est - prev) <= tol * est) {
      res.converged = true;
      return res;
    }
    prev = est;
    const Eigen::VectorXd z = transposed(w);
    const double zn = z.norm();
    if (zn == 0.0) {
      res.converged = true;
      return res;
    }
    v = z / zn;
  }
  return res;  // converged stays false; best estimate retained
}

namespace {

std::uint32_t read_be32(std::ifstream& in, std::size_t offset, const char* what) {
  unsigned char buf[4];
  in.read(reinterpret_cast<char*>(buf), 4);
  if (in.gcount() != 4)
    throw FormatError(std::string("IDX: truncated ") + what, offset);
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

IdxData load_idx(const std::string& path, int target_dim, IdxProjection projection,
                 std::uint64_t projection_seed) {
  if (target_dim < 1) throw ConfigError("load_idx: target dimension must be positive");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_idx: cannot open " + path);

  const std::uint32_t magic = read_be32(in, 0, "magic");
  if (magic != 0x00000803u)
    throw FormatError("IDX: bad magic (expected 0x00000803 unsigned-byte images)", 0);
  const std::uint32_t count = read_be32(in, 4, "image count");
  const std::uint32_t rows = read_be32(in, 8, "row count");
  const std::uint32_t cols = read_be32(in, 12, "column count");
  if (rows == 0 || cols == 0) throw FormatError("IDX: zero image dimensions", 8);

  const std::size_t pixels = std::size_t(rows) * cols;
  IdxData out;
  out.count = count;
  out.rows = rows;
  out.cols = cols;
  out.projection_seed = projection_seed;
  out.projection = projection == IdxProjection::Truncate ? "truncate" : "gaussian-random";

  Eigen::MatrixXd proj;
  if (projection == IdxProjection::GaussianRandom) {
    Rng rng(projection_seed);
    proj.resize(target_dim, static_cast<Eigen::Index>(pixels));
    const double sd = 1.0 / std::sqrt(static_cast<double>(pixels));
    for (Eigen::Index i = 0; i < proj.rows(); ++i)
      for (Eigen::Index j = 0; j < proj.cols(); ++j) proj(i, j) = sd * rng.gaussian();
  }

  std::vector<unsigned char> raw(pixels);
  out.vectors.reserve(count);
  for (std::uint32_t n = 0; n < count; ++n) {
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(pixels));
    if (static_cast<std::size_t>(in.gcount()) != pixels)
      throw FormatError("IDX: truncated payload",
                        16 + std::size_t(n) * pixels + static_cast<std::size_t>(in.gcount()));
    Eigen::VectorXd image(static_cast<Eigen::Index>(pixels));
    for (std::size_t p = 0; p < pixels; ++p) image(static_cast<Eigen::Index>(p)) = raw[p] / 255.0;
    if (projection == IdxProjection::Truncate) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(target_dim);
      const Eigen::Index m = std::min<Eigen::Index>(target_dim, image.size());
      v.head(m) = image.head(m);
      out.vectors.push_back(std::move(v));
    } else {
      out.vectors.push_back(proj * image);
    }
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw FormatError("IDX: trailing bytes after payload", 16 + std::size_t(count) * pixels);
  return out;
}

}  // namespace chaoslab
