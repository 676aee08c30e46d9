// Command-line front end: single-dataset tests, pairwise screening, entropy
// estimation, and Monte Carlo grids. All machine-readable output is JSON or
// CSV; every random quantity flows from one --seed value.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "elliptest/elliptic_test.hpp"
#include "elliptest/entropy.hpp"
#include "elliptest/errors.hpp"
#include "elliptest/io.hpp"
#include "elliptest/rng.hpp"
#include "elliptest/simharness.hpp"

namespace {

using elliptest::Matrix;
using elliptest::Vector;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitReject = 3;

struct CommonTestFlags {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int resamples = 100;
  int k_p = 0;  // 0 means automatic
  int k_1 = 0;
  std::string weights = "auto";
  std::string variance = "inflation";
  double c_exponent = 0.5;
  double bandwidth = 0.0;  // 0 means automatic
  double jitter = 0.0;     // 0 means off
  std::string out_path;
};

void add_common_flags(CLI::App* cmd, CommonTestFlags& flags) {
  cmd->add_option("--alpha", flags.alpha, "Significance level in (0, 0.5)")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Seed for all randomness")->capture_default_str();
  cmd->add_option("--b,--resamples", flags.resamples, "Debias resampling replications")
      ->capture_default_str();
  cmd->add_option("--kp", flags.k_p, "Neighbor count for the p-variate entropy (0 = auto)");
  cmd->add_option("--k1", flags.k_1, "Neighbor count for the radial entropy (0 = auto)");
  cmd->add_option("--weights", flags.weights, "Weight rule: auto, uniform, optimal")
      ->check(CLI::IsMember({"auto", "uniform", "optimal"}))
      ->capture_default_str();
  cmd->add_option("--variance", flags.variance, "Variance estimate: inflation or plugin")
      ->check(CLI::IsMember({"inflation", "plugin"}))
      ->capture_default_str();
  cmd->add_option("--c-exponent", flags.c_exponent,
                  "Ridge exponent for the plugin variance (adds n^{-c})")
      ->capture_default_str();
  cmd->add_option("--bandwidth", flags.bandwidth, "KDE bandwidth (0 = n^{-1/5})");
  cmd->add_option("--jitter", flags.jitter,
                  "Half-width of uniform noise added before testing (0 = off)");
  cmd->add_option("--out", flags.out_path, "Write output to this file instead of stdout");
}

elliptest::TestConfig to_config(const CommonTestFlags& flags) {
  elliptest::TestConfig cfg;
  cfg.alpha = flags.alpha;
  cfg.seed = flags.seed;
  cfg.resamples = flags.resamples;
  if (flags.k_p > 0) {
    cfg.k_p = flags.k_p;
  }
  if (flags.k_1 > 0) {
    cfg.k_1 = flags.k_1;
  }
  if (flags.weights == "uniform") {
    cfg.weight_rule = elliptest::WeightRule::Uniform;
  } else if (flags.weights == "optimal") {
    cfg.weight_rule = elliptest::WeightRule::Optimal;
  }
  cfg.variance_mode = flags.variance == "plugin" ? elliptest::VarianceMode::Plugin
                                                 : elliptest::VarianceMode::Inflation;
  cfg.c_exponent = flags.c_exponent;
  if (flags.bandwidth > 0.0) {
    cfg.bandwidth = flags.bandwidth;
  }
  if (flags.jitter > 0.0) {
    cfg.jitter = flags.jitter;
  }
  return cfg;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(content.c_str(), stdout);
  } else {
    elliptest::write_text_file(out_path, content);
  }
}

Vector parse_vector_arg(const std::string& text) {
  const elliptest::CsvData data = elliptest::parse_csv(text);
  if (data.values.rows() != 1) {
    throw elliptest::InvalidInput("--mu expects one comma-separated row, got '" + text + "'");
  }
  return data.values.row(0).transpose();
}

Matrix parse_matrix_arg(std::string text) {
  for (char& c : text) {
    if (c == ';') {
      c = '\n';
    }
  }
  return elliptest::parse_csv(text).values;
}

json config_json(const elliptest::TestConfig& cfg, const std::string& mode) {
  json j;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["resamples"] = cfg.resamples;
  j["k_p"] = cfg.k_p ? json(*cfg.k_p) : json(nullptr);
  j["k_1"] = cfg.k_1 ? json(*cfg.k_1) : json(nullptr);
  j["weights"] = cfg.weight_rule == elliptest::WeightRule::Auto
                     ? "auto"
                     : (cfg.weight_rule == elliptest::WeightRule::Uniform ? "uniform" : "optimal");
  j["variance"] =
      cfg.variance_mode == elliptest::VarianceMode::Inflation ? "inflation" : "plugin";
  j["c_exponent"] = cfg.c_exponent;
  j["bandwidth"] = cfg.bandwidth ? json(*cfg.bandwidth) : json(nullptr);
  j["jitter"] = cfg.jitter ? json(*cfg.jitter) : json(nullptr);
  j["mode"] = mode;
  return j;
}

json result_json(const elliptest::TestResult& r) {
  json j;
  j["t_raw"] = r.t_raw;
  j["t_bar"] = r.t_bar;
  j["t_debiased"] = r.t_debiased;
  j["sigma_hat"] = r.sigma_hat;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  j["h_y"] = r.h_y;
  j["h_u"] = r.h_u;
  j["e_log_u"] = r.e_log_u;
  j["k_p"] = r.k_p;
  j["k_1"] = r.k_1;
  j["n"] = r.n;
  j["p"] = r.p;
  j["alpha"] = r.alpha;
  j["weight_fallback"] = r.weight_fallback;
  return j;
}

int cmd_test(const std::string& input_path, const CommonTestFlags& flags, const std::string& mu_arg,
             const std::string& sigma_arg) {
  if (mu_arg.empty() != sigma_arg.empty()) {
    std::cerr << "error: known-moments mode requires both --mu and --sigma\n";
    return kExitError;
  }
  const elliptest::CsvData data = elliptest::read_csv(input_path);
  const elliptest::TestConfig cfg = to_config(flags);

  elliptest::TestResult result;
  std::string mode = "unknown";
  if (!mu_arg.empty()) {
    mode = "known";
    const Vector mu = parse_vector_arg(mu_arg);
    const Matrix sigma = parse_matrix_arg(sigma_arg);
    result = elliptest::run_test(data.values, mu, sigma, cfg);
  } else {
    result = elliptest::run_test(data.values, cfg);
  }
  if (result.weight_fallback) {
    std::cerr << "warning: optimal weights infeasible for this k and dimension; "
                 "uniform weights were used\n";
  }

  json out;
  out["schema_version"] = "1";
  out["command"] = "test";
  out["input"] = {{"path", input_path},
                  {"rows", static_cast<int>(data.values.rows())},
                  {"cols", static_cast<int>(data.values.cols())}};
  out["config"] = config_json(cfg, mode);
  out["result"] = result_json(result);
  emit(out.dump(2) + "\n", flags.out_path);
  return result.reject ? kExitReject : kExitOk;
}

int cmd_pairwise(const std::string& input_path, const CommonTestFlags& flags) {
  const elliptest::CsvData data = elliptest::read_csv(input_path);
  const elliptest::TestConfig cfg = to_config(flags);
  const elliptest::PairwiseResult result = elliptest::pairwise_test(data.values, cfg);

  json pairs = json::array();
  for (const elliptest::PairResult& pr : result.pairs) {
    json p;
    p["i"] = pr.i;
    p["j"] = pr.j;
    if (pr.error.empty()) {
      p["p_value"] = pr.p_value;
      p["reject"] = pr.reject;
    } else {
      p["error"] = pr.error;
    }
    pairs.push_back(p);
  }
  json out;
  out["schema_version"] = "1";
  out["command"] = "pairwise";
  out["input"] = {{"path", input_path},
                  {"rows", static_cast<int>(data.values.rows())},
                  {"cols", static_cast<int>(data.values.cols())}};
  out["alpha_family"] = result.alpha_family;
  out["alpha_individual"] = result.alpha_individual;
  out["n_pairs"] = static_cast<int>(result.pairs.size());
  out["any_reject"] = result.any_reject;
  out["pairs"] = pairs;
  emit(out.dump(2) + "\n", flags.out_path);
  return result.any_reject ? kExitReject : kExitOk;
}

int cmd_entropy(const std::string& input_path, int k, const std::string& weights, double jitter,
                std::uint64_t seed, const std::string& out_path) {
  elliptest::CsvData data = elliptest::read_csv(input_path);
  if (jitter > 0.0) {
    elliptest::apply_jitter(data.values, jitter, seed);
  }
  const int n = static_cast<int>(data.values.rows());
  const int d = static_cast<int>(data.values.cols());
  if (n < 3) {
    throw elliptest::InvalidInput("entropy estimation requires at least 3 rows");
  }
  const int k_used = k > 0 ? k : elliptest::choose_k(d, n);
  elliptest::WeightVector w;
  if (weights == "optimal") {
    w = elliptest::l2_optimal_weights(k_used, d);
  } else if (weights == "uniform" || d <= 3) {
    w = elliptest::uniform_weights(k_used, d);
  } else {
    try {
      w = elliptest::l2_optimal_weights(k_used, d);
    } catch (const elliptest::WeightInfeasible&) {
      std::cerr << "warning: optimal weights infeasible; uniform weights were used\n";
      w = elliptest::uniform_weights(k_used, d);
    }
  }
  const elliptest::EntropyEstimate est = elliptest::entropy_estimate(data.values, k_used, w);

  json out;
  out["schema_version"] = "1";
  out["command"] = "entropy";
  out["input"] = {{"path", input_path}, {"rows", n}, {"cols", d}};
  out["n"] = n;
  out["d"] = d;
  out["k"] = est.k;
  out["h"] = est.h;
  out["weights"] = std::vector<double>(est.weights.values.data(),
                                       est.weights.values.data() + est.weights.values.size());
  out["support"] = est.weights.support;
  out["sum_residual"] = est.weights.sum_residual;
  out["moment_residuals"] =
      std::vector<double>(est.weights.moment_residuals.data(),
                          est.weights.moment_residuals.data() + est.weights.moment_residuals.size());
  emit(out.dump(2) + "\n", out_path);
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& preset, bool seed_given,
                 std::uint64_t seed, int reps_override, int b_override, bool fast,
                 const std::string& format, bool timing, const std::string& out_path) {
  elliptest::ExperimentGrid grid;
  bool has_seed = false;
  if (!config_path.empty()) {
    const elliptest::ParsedGrid parsed =
        elliptest::parse_grid_config(elliptest::read_text_file(config_path));
    grid = parsed.grid;
    has_seed = parsed.has_seed;
  } else if (!preset.empty()) {
    grid = elliptest::preset_grid(preset);
  } else {
    std::cerr << "error: simulate requires --config or --preset\n";
    return kExitError;
  }
  if (seed_given) {
    grid.config.seed = seed;
    has_seed = true;
  }
  if (!has_seed) {
    std::cerr << "error: simulate requires a seed (--seed or a seed= line in the config)\n";
    return kExitError;
  }
  if (reps_override > 0) {
    grid.reps = reps_override;
  }
  if (b_override >= 0) {
    grid.config.resamples = b_override;
  }
  if (fast) {
    grid.config.resamples = 25;
  }

  const elliptest::RejectionTable table = elliptest::run_grid(grid);
  elliptest::OutputFormat fmt = elliptest::OutputFormat::Csv;
  if (format == "json") {
    fmt = elliptest::OutputFormat::Json;
  } else if (format == "markdown") {
    fmt = elliptest::OutputFormat::Markdown;
  }
  emit(elliptest::emit_table(table, fmt, timing), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL-divergence test for elliptical distributions"};
  app.require_subcommand(1);

  // test
  auto* test_cmd = app.add_subcommand("test", "Test a dataset for elliptical symmetry");
  std::string test_input;
  CommonTestFlags test_flags;
  std::string mu_arg, sigma_arg;
  test_cmd->add_option("input", test_input, "CSV data file (rows = observations)")->required();
  add_common_flags(test_cmd, test_flags);
  test_cmd->add_option("--mu", mu_arg, "Known location, comma-separated (enables known mode)");
  test_cmd->add_option("--sigma", sigma_arg,
                       "Known scatter, semicolon-separated rows (enables known mode)");

  // pairwise
  auto* pair_cmd =
      app.add_subcommand("pairwise", "Test all column pairs with a Bonferroni correction");
  std::string pair_input;
  CommonTestFlags pair_flags;
  pair_cmd->add_option("input", pair_input, "CSV data file")->required();
  add_common_flags(pair_cmd, pair_flags);

  // entropy
  auto* entropy_cmd = app.add_subcommand("entropy", "Nearest-neighbor entropy of a sample");
  std::string entropy_input, entropy_weights = "auto", entropy_out;
  int entropy_k = 0;
  double entropy_jitter = 0.0;
  std::uint64_t entropy_seed = 0;
  entropy_cmd->add_option("input", entropy_input, "CSV data file")->required();
  entropy_cmd->add_option("--k", entropy_k, "Neighbor count (0 = auto)");
  entropy_cmd->add_option("--weights", entropy_weights, "Weight rule: auto, uniform, optimal")
      ->check(CLI::IsMember({"auto", "uniform", "optimal"}));
  entropy_cmd->add_option("--jitter", entropy_jitter, "Uniform noise half-width (0 = off)");
  entropy_cmd->add_option("--seed", entropy_seed, "Seed for jitter");
  entropy_cmd->add_option("--out", entropy_out, "Write output to this file instead of stdout");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo rejection-rate grid");
  std::string sim_config, sim_preset, sim_format = "csv", sim_out;
  std::uint64_t sim_seed = 0;
  int sim_reps = 0;
  int sim_b = -1;
  bool sim_fast = false, sim_timing = false;
  sim_cmd->add_option("--config", sim_config, "Grid config file (key = value lines)");
  sim_cmd->add_option("--preset", sim_preset, "Built-in grid: size-study, power-study, smoke");
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Base seed (required here or in config)");
  sim_cmd->add_option("--reps", sim_reps, "Override replication count");
  sim_cmd->add_option("--b", sim_b, "Override debias resampling replications");
  sim_cmd->add_flag("--fast", sim_fast, "Quick mode: 25 debias replications");
  sim_cmd->add_option("--format", sim_format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));
  sim_cmd->add_flag("--timing", sim_timing,
                    "Include wall time per cell (breaks byte-reproducibility)");
  sim_cmd->add_option("--out", sim_out, "Write output to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (test_cmd->parsed()) {
      return cmd_test(test_input, test_flags, mu_arg, sigma_arg);
    }
    if (pair_cmd->parsed()) {
      return cmd_pairwise(pair_input, pair_flags);
    }
    if (entropy_cmd->parsed()) {
      return cmd_entropy(entropy_input, entropy_k, entropy_weights, entropy_jitter, entropy_seed,
                         entropy_out);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_config, sim_preset, sim_seed_opt->count() > 0, sim_seed, sim_reps,
                          sim_b, sim_fast, sim_format, sim_timing, sim_out);
    }
  } catch (const elliptest::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
