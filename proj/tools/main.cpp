// chaoslab: sample random recurrent maps, detect period-3 chaos, and emit
// plot-ready data for the sweep/scrambling/region-growth/Jacobian experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 piece-budget exhaustion,
// 4 I/O failure.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chaoslab/chaos.hpp"
#include "chaoslab/dynamics.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/highdim.hpp"
#include "chaoslab/montecarlo.hpp"
#include "chaoslab/netgen.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/pwl.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/serialize.hpp"

namespace cl = chaoslab;
using cl::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to <path>.partial and renames on commit, so an aborted run leaves a
// .partial file instead of a truncated result. "-" streams to stdout.
class OutputFile {
 public:
  explicit OutputFile(std::string path) : path_(std::move(path)) {
    if (path_ == "-") return;
    file_.open(path_ + ".partial", std::ios::trunc);
    if (!file_) throw cl::IoError("cannot open output file " + path_ + ".partial");
  }

  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }

  void commit() {
    if (path_ == "-") return;
    file_.flush();
    if (!file_) throw cl::IoError("write failure on " + path_ + ".partial");
    file_.close();
    std::error_code ec;
    std::filesystem::rename(path_ + ".partial", path_, ec);
    if (ec) throw cl::IoError("cannot finalize " + path_ + ": " + ec.message());
  }

 private:
  std::string path_;
  std::ofstream file_;
};

enum class Format { Csv, Jsonl };

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "jsonl") return Format::Jsonl;
  throw cl::ConfigError("unknown output format: " + name);
}

void write_header(std::ostream& os, Format format, const json& config,
                  const std::vector<std::string>& columns) {
  if (format == Format::Csv) {
    os << "# config=" << config.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
  } else {
    os << json{{"config", config}}.dump() << "\n";
  }
}

void write_row(std::ostream& os, Format format, const json& row,
               const std::vector<std::string>& columns) {
  if (format == Format::Csv) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os << ",";
      const json& cell = row.at(columns[i]);
      if (cell.is_number_float())
        os << fmt(cell.get<double>());
      else if (cell.is_string())
        os << cell.get<std::string>();
      else
        os << cell.dump();
    }
    os << "\n";
  } else {
    os << row.dump() << "\n";
  }
}

// Shared scheme flags. A JSON config file provides defaults; explicitly
// passed flags win.
struct SchemeFlags {
  std::string name = "he-normal";
  double sigma2 = 2.0;
  std::string variance_rule = "sigma2-over-k";
  double sigma_exp = 0.0;
  std::string bias_rule = "uniform-0-1";

  void attach(CLI::App* app) {
    app->add_option("--scheme", name, "initialization scheme name");
    app->add_option("--sigma2", sigma2, "weight variance numerator (variance = sigma2/k)");
    app->add_option("--variance-rule", variance_rule,
                    "sigma2-over-k | quarter-k-log-k | sigma-power-k");
    app->add_option("--sigma-exp", sigma_exp, "sigma = k^exp for sigma-power-k");
    app->add_option("--bias-rule", bias_rule, "uniform-0-1 | zero | uniform-symmetric");
  }

  cl::InitScheme build() const {
    cl::InitScheme s = cl::parse_scheme(name);
    s.sigma2 = sigma2;
    s.variance_rule = cl::parse_variance_rule(variance_rule);
    s.sigma_exponent = sigma_exp;
    s.bias_rule = cl::parse_bias_rule(bias_rule);
    return s;
  }
};

// Applies config-file values to any option the user did not pass explicitly.
void merge_config_file(CLI::App* cmd, const std::string& config_path) {
  if (config_path.empty()) return;
  std::ifstream in(config_path);
  if (!in) throw cl::IoError("cannot open config file " + config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw cl::ConfigError("config file parse error: " + std::string(e.what()));
  }
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + it.key());
    if (!opt || opt->count() > 0) continue;
    const json& v = it.value();
    std::string text;
    if (v.is_string())
      text = v.get<std::string>();
    else
      text = v.dump();
    opt->add_result(text);
    opt->run_callback();
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cerr << "master_seed=" << s << " (generated; pass --seed to reproduce)\n";
  return s;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw cl::ConfigError("empty grid: " + text);
  return out;
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) out.push_back(static_cast<int>(v));
  return out;
}

// ---------------------------------------------------------------------------
// detect

struct DetectArgs {
  SchemeFlags scheme;
  int k = 64;
  std::optional<std::uint64_t> seed;
  std::string reference;
  std::string detector = "exact";
  long budget = cl::kDefaultPieceBudget;
  long grid = 100'000;
  std::string emit_plot;
  std::string output = "-";
};

int run_detect(const DetectArgs& a) {
  cl::ChaosVerdict verdict;
  json meta;
  cl::PwlMap map = cl::reference_triangle();

  if (!a.reference.empty()) {
    if (a.reference != "triangle")
      throw cl::ConfigError("unknown reference map: " + a.reference);
    verdict = cl::detect_period3_exact(map, a.budget);
    meta = cl::verdict_json(verdict, 0, 0, "reference-triangle");
  } else {
    if (!a.seed) throw cl::ConfigError("detect: --seed is required (or use --reference)");
    const cl::InitScheme scheme = a.scheme.build();
    const cl::NetworkSample sample = cl::sample_network(a.k, scheme, *a.seed);
    map = cl::build_map(sample);
    const bool screen = cl::screen_period3(cl::y_sequence(sample));
    if (a.detector == "numeric")
      verdict = cl::detect_period3_numeric([&map](double x) { return map(x); }, a.grid);
    else if (a.detector == "exact" || a.detector == "screen")
      verdict = cl::detect_period3_exact(map, a.budget);
    else
      throw cl::ConfigError("unknown detector: " + a.detector);
    verdict.screen_fired = screen;
    meta = cl::verdict_json(verdict, *a.seed, a.k, cl::scheme_name(scheme.family));
    meta["has_nonzero_fixed_point"] = cl::has_nonzero_fixed_point(map);
  }

  if (!a.emit_plot.empty()) {
    json config{{"command", "detect"},      {"reference", a.reference},
                {"k", a.k},                 {"scheme", a.scheme.name},
                {"sigma2", a.scheme.sigma2}, {"variance-rule", a.scheme.variance_rule},
                {"sigma-exp", a.scheme.sigma_exp}, {"bias-rule", a.scheme.bias_rule},
                {"seed", a.seed ? *a.seed : 0},    {"detector", a.detector},
                {"budget", a.budget},        {"grid", a.grid}};
    const cl::PwlMap f3 = cl::iterate_t(map, 3, a.budget);
    const Eigen::Index n = 2001;
    const Eigen::VectorXd g1 = cl::evaluate_grid(map, n);
    const Eigen::VectorXd g3 = cl::evaluate_grid(f3, n);
    OutputFile out(a.emit_plot);
    out.stream() << "# config=" << config.dump() << "\nx,f,f3\n";
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / static_cast<double>(n - 1);
      out.stream() << fmt(x) << "," << fmt(g1(j)) << "," << fmt(g3(j)) << "\n";
    }
    out.commit();
  }

  OutputFile out(a.output);
  out.stream() << meta.dump(2) << "\n";
  out.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// table

struct TableArgs {
  std::string schemes = "he-normal,he-uniform,glorot-normal,glorot-uniform,truncated-normal";
  std::string bias_rule = "uniform-0-1";
  long trials = 10000;
  std::optional<std::uint64_t> seed;
  bool clip = true;
  std::string activation = "relu";
  long budget = cl::kDefaultPieceBudget;
  long grid = 100'000;
  std::string output = "-";
  std::string format = "csv";
};

int run_table(const TableArgs& a) {
  const Format format = parse_format(a.format);
  const std::uint64_t master = resolve_seed(a.seed);
  const cl::Activation act = cl::parse_activation(a.activation);

  std::vector<std::string> names;
  {
    std::stringstream ss(a.schemes);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) names.push_back(item);
  }
  if (names.empty()) throw cl::ConfigError("table: no schemes given");

  json config{{"command", "table"},   {"schemes", a.schemes},  {"bias-rule", a.bias_rule},
              {"trials", a.trials},   {"seed", master},        {"clip", a.clip},
              {"activation", a.activation}, {"budget", a.budget}, {"grid", a.grid}};
  const std::vector<std::string> columns{"scheme",       "n_trials", "n_chaotic", "n_unreliable",
                                         "p_hat",        "ci_low",   "ci_high",   "detector"};

  OutputFile out(a.output);
  write_header(out.stream(), format, config, columns);
  for (const std::string& name : names) {
    cl::SweepConfig cfg;
    cfg.architecture = cl::Architecture::Depth2;
    cfg.scheme = cl::parse_scheme(name);
    cfg.scheme.bias_rule = cl::parse_bias_rule(a.bias_rule);
    cfg.activation = act;
    cfg.clipping = a.clip;
    cfg.detector = (act == cl::Activation::Relu && a.clip) ? cl::Detector::Exact
                                                           : cl::Detector::Numeric;
    cfg.n_trials = a.trials;
    cfg.master_seed = master;
    cfg.piece_budget = a.budget;
    cfg.numeric_grid = a.grid;
    const cl::SweepResult r = cl::estimate_chaos_probability(cfg);
    json row{{"scheme", name},
             {"n_trials", r.config.n_trials},
             {"n_chaotic", r.n_chaotic},
             {"n_unreliable", r.n_unreliable},
             {"p_hat", r.p_hat},
             {"ci_low", r.ci_low},
             {"ci_high", r.ci_high},
             {"detector", cl::detector_name(cfg.detector)}};
    write_row(out.stream(), format, row, columns);
  }
  out.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  SchemeFlags scheme;
  int k = 64;
  std::string k_grid;
  std::string sigma_grid;
  long trials = 10000;
  std::optional<std::uint64_t> seed;
  std::string detector = "exact";
  long budget = 1'000'000;
  long grid = 100'000;
  std::string output = "-";
  std::string format = "csv";
};

json sweep_row(const cl::SweepResult& r) {
  const int k = r.config.k;
  const double variance = r.config.scheme.weight_variance(k);
  return json{{"k", k},
              {"sigma", std::sqrt(variance * k)},
              {"variance", variance},
              {"regime", r.regime_label},
              {"n_trials", r.config.n_trials},
              {"n_chaotic", r.n_chaotic},
              {"n_unreliable", r.n_unreliable},
              {"n_fixed_point", r.n_fixed_point},
              {"p_hat", r.p_hat},
              {"ci_low", r.ci_low},
              {"ci_high", r.ci_high}};
}

int run_sweep(const SweepArgs& a) {
  const Format format = parse_format(a.format);
  const std::uint64_t master = resolve_seed(a.seed);
  const std::vector<int> ks = a.k_grid.empty() ? std::vector<int>{a.k} : parse_int_grid(a.k_grid);

  json config{{"command", "sweep"},        {"scheme", a.scheme.name},
              {"sigma2", a.scheme.sigma2},  {"variance-rule", a.scheme.variance_rule},
              {"sigma-exp", a.scheme.sigma_exp}, {"bias-rule", a.scheme.bias_rule},
              {"k-grid", a.k_grid.empty() ? std::to_string(a.k) : a.k_grid},
              {"sigma-grid", a.sigma_grid}, {"trials", a.trials},
              {"seed", master},             {"detector", a.detector},
              {"budget", a.budget},         {"grid", a.grid}};
  const std::vector<std::string> columns{"k",        "sigma",     "variance",     "regime",
                                         "n_trials", "n_chaotic", "n_unreliable", "n_fixed_point",
                                         "p_hat",    "ci_low",    "ci_high"};

  OutputFile out(a.output);
  write_header(out.stream(), format, config, columns);
  for (int k : ks) {
    cl::SweepConfig cfg;
    cfg.architecture = cl::Architecture::Shallow;
    cfg.k = k;
    cfg.scheme = a.scheme.build();
    cfg.detector = cl::parse_detector(a.detector);
    cfg.n_trials = a.trials;
    cfg.master_seed = master;
    cfg.piece_budget = a.budget;
    cfg.numeric_grid = a.grid;
    if (a.sigma_grid.empty()) {
      write_row(out.stream(), format, sweep_row(cl::estimate_chaos_probability(cfg)), columns);
    } else {
      for (const cl::SweepResult& r : cl::sweep_sigma(cfg, parse_grid(a.sigma_grid)))
        write_row(out.stream(), format, sweep_row(r), columns);
    }
  }
  out.commit();
  return 0;
}

// ---------------------------------------------------------------------------
// scramble

struct ScrambleArgs {
  SchemeFlags scheme;
  int k = 64;
  std::optional<std::uint64_t> seed;
  double gap = 1e-7;
  int t = 150;
  long count = 1;
  std::string filter = "none";  // none | chaotic | contracting
  long max_scan = 100'000;
  long budget = cl::kDefaultPieceBudget;
  std::string emit_series;
  std::string output = "-";
  std::string format = "csv";
};

int run_scramble(const ScrambleArgs& a) {
  const Format format = parse_format(a.format);
  const std::uint64_t master = resolve_seed(a.seed);
  const cl::InitScheme scheme = a.scheme.build();
  if (a.filter != "none" && a.filter != "chaotic" && a.filter != "contracting")
    throw cl::ConfigError("scramble: unknown filter " + a.filter);

  json config{{"command", "scramble"}, {"scheme", a.scheme.name},
              {"sigma2", a.scheme.sigma2}, {"variance-rule", a.scheme.variance_rule},
              {"sigma-exp", a.scheme.sigma_exp}, {"bias-rule", a.scheme.bias_rule},
              {"k", a.k},              {"gap", a.gap},            {"t", a.t},
              {"count", a.count},      {"filter", a.filter},      {"max-scan", a.max_scan},
              {"budget", a.budget},    {"seed", master}};
  const std::vector<std::string> columns{"index",      "trial_seed", "is_period3", "reliable",
                                         "x0",         "min_tail",   "max_tail"};

  struct Row {
    std::uint64_t trial_seed;
    bool period3, reliable;
    double x0;
    cl::ScramblingReport rep;
  };
  std::vector<Row> rows;

  for (long trial = 0; trial < a.max_scan && static_cast<long>(rows.size()) < a.count; ++trial) {
    const std::uint64_t trial_seed = cl::derive_seed(master, static_cast<std::uint64_t>(trial));
    const cl::NetworkSample sample = cl::sample_network(a.k, scheme, trial_seed);
    const cl::PwlMap map = cl::build_map(sample);
    bool period3 = false, reliable = true;
    if (a.filter != "contracting") {
      try {
        const cl::ChaosVerdict v = cl::detect_period3_exact(map, a.budget);
        period3 = v.is_period3;
        reliable = v.reliable;
      } catch (const cl::BudgetError&) {
        reliable = false;
      }
      if (a.filter == "chaotic" && !(reliable && period3)) continue;
    } else if (cl::has_nonzero_fixed_point(map)) {
      continue;
    }
    cl::Rng xrng(cl::derive_seed(trial_seed, 1));
    const double x0 = xrng.uniform() * (1.0 - a.gap);
    rows.push_back({trial_seed, period3, reliable, x0,
                    cl::scrambling_report(map, x0, a.gap, a.t)});
  }
  if (static_cast<long>(rows.size()) < a.count)
    std::cerr << "scramble: only " << rows.size() << " of " << a.count
              << " matching samples found within --max-scan\n";

  OutputFile out(a.output);
  write_header(out.stream(), format, config, columns);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    write_row(out.stream(), format,
              json{{"index", i},
                   {"trial_seed", r.trial_seed},
                   {"is_period3", r.period3},
                   {"reliable", r.reliable},
                   {"x0", r.x0},
                   {"min_tail", r.rep.min_tail},
                   {"max_tail", r.rep.max_tail}},
              columns);
  }
  out.commit();

  if (!a.emit_series.empty()) {
    OutputFile series(a.emit_series);
    const std::vector<std::string> scol{"index", "t", "distance"};
    write_header(series.stream(), format, config, scol);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (int t = 0; t <= rows[i].rep.horizon; ++t)
        write_row(series.stream(), format,
                  json{{"index", i}, {"t", t}, {"distance", rows[i].rep.distances(t)}}, scol);
    series.commit();
  }
  return 0;
}

// ---------------------------------------------------------------------------
// regions

struct RegionsArgs {
  SchemeFlags scheme;
  std::string reference;
  int k = 64;
  std::optional<std::uint64_t> seed;
  int t = 10;
  long budget = 2'000'000;
  int fit_min_t = 3;
  double noise = 0.0;
  std::string perturb_mode = "both";  // shared | independent | both
  long count = 100;
  std::string output = "-";
  std::string format = "csv";
};

int run_regions(const RegionsArgs& a) {
  const Format format = parse_format(a.format);

  if (a.noise > 0.0) {
    // Perturbation contrast: the recurrent mode iterates one perturbed net
    // (clipped feedback), the feedforward mode composes t freshly perturbed
    // stages without clipping between them.
    const std::uint64_t master = resolve_seed(a.seed);
    json config{{"command", "regions"}, {"noise", a.noise},
                {"perturb-mode", a.perturb_mode}, {"t", a.t}, {"count", a.count},
                {"seed", master},        {"budget", a.budget}};
    const std::vector<std::string> columns{"trial", "mode", "regions"};
    std::vector<std::string> modes;
    if (a.perturb_mode == "both")
      modes = {"shared", "independent"};
    else if (a.perturb_mode == "shared" || a.perturb_mode == "independent")
      modes = {a.perturb_mode};
    else
      throw cl::ConfigError("regions: unknown perturb mode " + a.perturb_mode);

    OutputFile out(a.output);
    write_header(out.stream(), format, config, columns);
    const cl::Depth2Net base = cl::triangle_depth2();
    for (long trial = 0; trial < a.count; ++trial) {
      const std::uint64_t seed = cl::derive_seed(master, static_cast<std::uint64_t>(trial));
      for (const std::string& mode : modes) {
        const bool shared = mode == "shared";
        const auto stages = cl::perturb_unrolled(
            base, a.noise, a.t,
            shared ? cl::PerturbMode::Shared : cl::PerturbMode::IndependentPerLayer, seed);
        long regions = -1;  // -1 marks a blown budget
        try {
          regions = cl::count_regions(cl::compose_stages(stages, true, a.budget));
        } catch (const cl::BudgetError&) {
        }
        write_row(out.stream(), format,
                  json{{"trial", trial}, {"mode", mode}, {"regions", regions}}, columns);
      }
    }
    out.commit();
    return 0;
  }

  // Plain growth series of a single map.
  cl::PwlMap map = cl::reference_triangle();
  if (!a.reference.empty()) {
    if (a.reference != "triangle") throw cl::ConfigError("unknown reference map: " + a.reference);
  } else {
    if (!a.seed) throw cl::ConfigError("regions: --seed is required (or use --reference)");
    map = cl::build_map(cl::sample_network(a.k, a.scheme.build(), *a.seed));
  }
  json config{{"command", "regions"},      {"reference", a.reference},
              {"k", a.k},                  {"scheme", a.scheme.name},
              {"sigma2", a.scheme.sigma2}, {"variance-rule", a.scheme.variance_rule},
              {"sigma-exp", a.scheme.sigma_exp}, {"bias-rule", a.scheme.bias_rule},
              {"seed", a.seed ? *a.seed : 0},    {"t", a.t},
              {"budget", a.budget},        {"fit-min-t", a.fit_min_t}};
  const std::vector<std::string> columns{"t", "regions", "fitted_rate"};

  const cl::RegionGrowthSeries series = cl::region_growth(map, a.t, a.budget, a.fit_min_t);
  OutputFile out(a.output);
  write_header(out.stream(), format, config, columns);
  for (std::size_t i = 0; i < series.counts.size(); ++i)
    write_row(out.stream(), format,
              json{{"t", i + 1}, {"regions", series.counts[i]}, {"fitted_rate", series.fitted_rate}},
              columns);
  out.commit();
  if (series.truncated_at)
    std::cerr << "regions: series truncated by the piece budget at t=" << *series.truncated_at
              << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// highdim

struct HighdimArgs {
  int d = 64;
  int t = 20;
  std::string sigma_grid = "0.5,1,1.5,2,2.5,3,3.5,4";
  long trials = 300;
  std::optional<std::uint64_t> seed;
  std::string mode = "sweep";  // sweep | trace
  std::string bias = "zero";
  std::string idx_path;
  std::string proj = "truncate";
  int max_steps = 200;
  std::string output = "-";
  std::string format = "csv";
};

int run_highdim(const HighdimArgs& a) {
  const Format format = parse_format(a.format);
  const std::uint64_t master = resolve_seed(a.seed);
  const std::vector<double> sigmas = parse_grid(a.sigma_grid);
  const cl::HighDimBias bias_kind = a.bias == "zero"      ? cl::HighDimBias::Zero
                                    : a.bias == "uniform" ? cl::HighDimBias::Uniform01
                                                          : throw cl::ConfigError(
                                                                "highdim: unknown bias " + a.bias);

  std::vector<Eigen::VectorXd> inputs;
  if (!a.idx_path.empty()) {
    const cl::IdxProjection proj = a.proj == "truncate" ? cl::IdxProjection::Truncate
                                   : a.proj == "random" ? cl::IdxProjection::GaussianRandom
                                                        : throw cl::ConfigError(
                                                              "highdim: unknown projection " +
                                                              a.proj);
    inputs = cl::load_idx(a.idx_path, a.d, proj, master).vectors;
    if (inputs.empty()) throw cl::ConfigError("highdim: IDX file holds no images");
  }
  auto initial_state = [&](std::uint64_t trial_seed, long index) {
    if (!inputs.empty()) return inputs[static_cast<std::size_t>(index) % inputs.size()];
    cl::Rng rng(cl::derive_seed(trial_seed, 2));
    Eigen::VectorXd u0(a.d);
    for (int i = 0; i < a.d; ++i) u0(i) = rng.uniform();
    return u0;
  };

  json config{{"command", "highdim"}, {"d", a.d},           {"t", a.t},
              {"sigma-grid", a.sigma_grid}, {"trials", a.trials}, {"seed", master},
              {"mode", a.mode},       {"bias", a.bias},     {"idx", a.idx_path},
              {"proj", a.proj},       {"max-steps", a.max_steps}};

  OutputFile out(a.output);
  if (a.mode == "trace") {
    const std::vector<std::string> columns{"sigma", "t", "n0", "n1", "n2", "n3"};
    write_header(out.stream(), format, config, columns);
    for (double sigma : sigmas) {
      const std::uint64_t seed = cl::derive_seed(master, static_cast<std::uint64_t>(sigma * 4096));
      const cl::VectorRnn rnn = cl::sample_vector_rnn(a.d, sigma, seed, bias_kind);
      const auto states = cl::iterate_state(rnn, initial_state(seed, 0), a.t);
      for (std::size_t s = 0; s < states.size(); ++s) {
        json row{{"sigma", sigma}, {"t", s}};
        for (int n = 0; n < 4; ++n)
          row["n" + std::to_string(n)] = n < a.d ? states[s](n) : 0.0;
        write_row(out.stream(), format, row, columns);
      }
    }
    out.commit();
    return 0;
  }
  if (a.mode != "sweep") throw cl::ConfigError("highdim: unknown mode " + a.mode);

  const std::vector<std::string> columns{"sigma",   "n_trials", "n_norm_gt_1", "n_unconverged",
                                         "fraction", "ci_low",   "ci_high"};
  write_header(out.stream(), format, config, columns);
  for (double sigma : sigmas) {
    std::vector<unsigned char> gt(static_cast<std::size_t>(a.trials), 0);
    std::vector<unsigned char> unconv(static_cast<std::size_t>(a.trials), 0);
    cl::parallel_for(a.trials, [&](long i) {
      const std::uint64_t trial_seed = cl::derive_seed(master, static_cast<std::uint64_t>(i));
      const cl::VectorRnn rnn = cl::sample_vector_rnn(a.d, sigma, trial_seed, bias_kind);
      const cl::JacobianResult res = cl::jacobian_spectral_norm(
          rnn, initial_state(trial_seed, i), a.t, a.max_steps);
      gt[static_cast<std::size_t>(i)] = res.spectral_norm > 1.0 ? 1 : 0;
      unconv[static_cast<std::size_t>(i)] = res.converged ? 0 : 1;
    });
    long n_gt = 0, n_unconv = 0;
    for (unsigned char g : gt) n_gt += g;
    for (unsigned char u : unconv) n_unconv += u;
    const auto ci = cl::wilson_ci(n_gt, a.trials, 0.95);
    write_row(out.stream(), format,
              json{{"sigma", sigma},
                   {"n_trials", a.trials},
                   {"n_norm_gt_1", n_gt},
                   {"n_unconverged", n_unconv},
                   {"fraction", static_cast<double>(n_gt) / static_cast<double>(a.trials)},
                   {"ci_low", ci.first},
                   {"ci_high", ci.second}},
              columns);
  }
  out.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: chaos in randomly initialized recurrent maps"};
  app.require_subcommand(1);

  DetectArgs detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "classify one sampled map for period 3");
  detect.scheme.attach(detect_cmd);
  detect_cmd->add_option("--k", detect.k, "network width");
  detect_cmd->add_option("--seed", detect.seed, "sample seed");
  detect_cmd->add_option("--reference", detect.reference, "built-in map (triangle)");
  detect_cmd->add_option("--detector", detect.detector, "exact | numeric");
  detect_cmd->add_option("--budget", detect.budget, "piece budget for f^3");
  detect_cmd->add_option("--grid", detect.grid, "numeric detector grid size");
  detect_cmd->add_option("--emit-plot", detect.emit_plot, "write (x, f, f^3) grid CSV here");
  detect_cmd->add_option("--output", detect.output, "verdict destination (default stdout)");

  TableArgs table;
  CLI::App* table_cmd =
      app.add_subcommand("table", "depth-2 chaos-frequency table across schemes");
  table_cmd->add_option("--schemes", table.schemes, "comma-separated scheme list");
  table_cmd->add_option("--bias-rule", table.bias_rule, "bias rule for all rows");
  table_cmd->add_option("--trials", table.trials, "trials per scheme");
  table_cmd->add_option("--seed", table.seed, "master seed");
  table_cmd->add_flag("--clip,!--no-clip", table.clip, "clip the output to [0,1]");
  table_cmd->add_option("--activation", table.activation, "relu | tanh");
  table_cmd->add_option("--budget", table.budget, "piece budget");
  table_cmd->add_option("--grid", table.grid, "numeric detector grid size");
  table_cmd->add_option("--output", table.output, "output file (default stdout)");
  table_cmd->add_option("--format", table.format, "csv | jsonl");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo P(period 3) over k and sigma");
  sweep.scheme.attach(sweep_cmd);
  sweep_cmd->add_option("--k", sweep.k, "network width");
  sweep_cmd->add_option("--k-grid", sweep.k_grid, "comma-separated widths");
  sweep_cmd->add_option("--sigma-grid", sweep.sigma_grid, "comma-separated sigma values");
  sweep_cmd->add_option("--trials", sweep.trials, "trials per grid point");
  sweep_cmd->add_option("--seed", sweep.seed, "master seed");
  sweep_cmd->add_option("--detector", sweep.detector, "exact | screen | numeric");
  sweep_cmd->add_option("--budget", sweep.budget, "piece budget per trial");
  sweep_cmd->add_option("--grid", sweep.grid, "numeric detector grid size");
  sweep_cmd->add_option("--output", sweep.output, "output file (default stdout)");
  sweep_cmd->add_option("--format", sweep.format, "csv | jsonl");

  ScrambleArgs scramble;
  CLI::App* scramble_cmd =
      app.add_subcommand("scramble", "trajectory-pair distance series and tail statistics");
  scramble.scheme.attach(scramble_cmd);
  scramble_cmd->add_option("--k", scramble.k, "network width");
  scramble_cmd->add_option("--seed", scramble.seed, "master seed");
  scramble_cmd->add_option("--gap", scramble.gap, "initial separation");
  scramble_cmd->add_option("--t", scramble.t, "horizon");
  scramble_cmd->add_option("--count", scramble.count, "number of samples to report");
  scramble_cmd->add_option("--filter", scramble.filter, "none | chaotic | contracting");
  scramble_cmd->add_option("--max-scan", scramble.max_scan, "seed scan cap for filters");
  scramble_cmd->add_option("--budget", scramble.budget, "piece budget for verdicts");
  scramble_cmd->add_option("--emit-series", scramble.emit_series, "write (index,t,d) rows here");
  scramble_cmd->add_option("--output", scramble.output, "summary output (default stdout)");
  scramble_cmd->add_option("--format", scramble.format, "csv | jsonl");

  RegionsArgs regions;
  CLI::App* regions_cmd =
      app.add_subcommand("regions", "linear-region growth and perturbation contrast");
  regions.scheme.attach(regions_cmd);
  regions_cmd->add_option("--reference", regions.reference, "built-in map (triangle)");
  regions_cmd->add_option("--k", regions.k, "network width");
  regions_cmd->add_option("--seed", regions.seed, "sample/master seed");
  regions_cmd->add_option("--t", regions.t, "iterations");
  regions_cmd->add_option("--budget", regions.budget, "piece budget");
  regions_cmd->add_option("--fit-min-t", regions.fit_min_t, "first t used in the rate fit");
  regions_cmd->add_option("--noise", regions.noise, "perturbation stddev (enables perturb mode)");
  regions_cmd->add_option("--perturb-mode", regions.perturb_mode, "shared | independent | both");
  regions_cmd->add_option("--count", regions.count, "perturbation trials");
  regions_cmd->add_option("--output", regions.output, "output file (default stdout)");
  regions_cmd->add_option("--format", regions.format, "csv | jsonl");

  HighdimArgs highdim;
  CLI::App* highdim_cmd =
      app.add_subcommand("highdim", "vector RNN traces and Jacobian-norm transition");
  highdim_cmd->add_option("--d", highdim.d, "state dimension");
  highdim_cmd->add_option("--t", highdim.t, "iterations");
  highdim_cmd->add_option("--sigma-grid", highdim.sigma_grid, "comma-separated sigma values");
  highdim_cmd->add_option("--trials", highdim.trials, "trials per sigma");
  highdim_cmd->add_option("--seed", highdim.seed, "master seed");
  highdim_cmd->add_option("--mode", highdim.mode, "sweep | trace");
  highdim_cmd->add_option("--bias", highdim.bias, "zero | uniform");
  highdim_cmd->add_option("--idx", highdim.idx_path, "IDX image file for initial states");
  highdim_cmd->add_option("--proj", highdim.proj, "truncate | random");
  highdim_cmd->add_option("--max-steps", highdim.max_steps, "power iteration cap");
  highdim_cmd->add_option("--output", highdim.output, "output file (default stdout)");
  highdim_cmd->add_option("--format", highdim.format, "csv | jsonl");

  std::string config_path;
  for (CLI::App* cmd : {detect_cmd, table_cmd, sweep_cmd, scramble_cmd, regions_cmd, highdim_cmd})
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help
      std::cerr << e.what() << "\n";
      return 2;
    }
    CLI::App* active = app.get_subcommands().front();
    merge_config_file(active, config_path);
    if (*detect_cmd) return run_detect(detect);
    if (*table_cmd) return run_table(table);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*scramble_cmd) return run_scramble(scramble);
    if (*regions_cmd) return run_regions(regions);
    if (*highdim_cmd) return run_highdim(highdim);
    return 2;
  } catch (const cl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cl::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const cl::FormatError& e) {
    std::cerr << "format error at byte " << e.offset << ": " << e.what() << "\n";
    return 4;
  } catch (const cl::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
