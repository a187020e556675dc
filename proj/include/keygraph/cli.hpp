#pragma once

// Command-line front end: sweep, threshold, verify, zeroone.
//
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 infeasible
// parameters, 4 no threshold.
//
// Every command accepts --config <path>: a flat JSON object keyed by flag names
// (without dashes), or an emitted JSON report whose manifest.config is replayed.
// Flags given on the command line override the file.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "keygraph/errors.hpp"
#include "keygraph/experiment.hpp"
#include "keygraph/model_core.hpp"
#include "keygraph/report.hpp"
#include "keygraph/verify_suite.hpp"
#include "keygraph/version.hpp"

namespace keygraph::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kInfeasible = 3,
  kNoThreshold = 4,
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::uint64_t seed{1};
  unsigned threads{0};  // 0: KEYGRAPH_THREADS, then hardware concurrency
  std::string out;
  std::string config;
  std::string format{"csv"};
  CLI::Option* seed_opt{nullptr};
  CLI::Option* threads_opt{nullptr};
};

inline void add_common_flags(CLI::App& cmd, CommonFlags& flags) {
  flags.seed_opt = cmd.add_option("--seed", flags.seed, "Master seed (u64)");
  flags.threads_opt = cmd.add_option("--threads", flags.threads, "Worker threads (falls back to KEYGRAPH_THREADS)");
  cmd.add_option("--out", flags.out, "Output directory for report files");
  cmd.add_option("--config", flags.config, "JSON config file or emitted report to replay");
  cmd.add_option("--format", flags.format, "Standard output format")->check(CLI::IsMember({"csv", "json"}));
}

namespace detail {

inline json load_config(const std::string& path) {
  if (path.empty()) {
    return json::object();
  }
  std::ifstream in{path};
  if (!in) {
    throw config_error("cannot read config file " + path);
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error("config file " + path + ": " + e.what());
  }
  if (doc.contains("manifest") && doc["manifest"].contains("config")) {
    return doc["manifest"]["config"];
  }
  if (!doc.is_object()) {
    throw config_error("config file " + path + " must hold a JSON object");
  }
  return doc;
}

/// Takes `key` from the file unless the flag was given on the command line.
template <class T>
void merge(const json& file, const CLI::Option* opt, const char* key, T& value) {
  if (opt->count() == 0 && file.contains(key)) {
    try {
      value = file.at(key).get<T>();
    } catch (const json::exception& e) {
      throw config_error(std::string{"config key '"} + key + "': " + e.what());
    }
  }
}

inline unsigned resolve_thread_count(unsigned requested) {
  if (requested != 0) {
    return requested;
  }
  if (const char* env = std::getenv("KEYGRAPH_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
    throw config_error(std::string{"KEYGRAPH_THREADS must be a positive integer, got '"} + env + "'");
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out{path, std::ios::binary};
  if (!out) {
    throw config_error("cannot write " + path.string());
  }
  out << text;
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline AlphaRule parse_alpha_rule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw config_error("alpha-rule must be constant:<a>, inverse_log:<a> or power:<gamma>");
  }
  const std::string kind = text.substr(0, colon);
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) {
      throw std::invalid_argument("trailing characters");
    }
  } catch (const std::exception&) {
    throw config_error("alpha-rule value is not a number: " + text);
  }
  if (kind == "constant") {
    return AlphaRule::constant(value);
  }
  if (kind == "inverse_log") {
    return AlphaRule::inverse_log(value);
  }
  if (kind == "power") {
    return AlphaRule::power(value);
  }
  throw config_error("unknown alpha-rule kind '" + kind + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct SweepFlags {
  CommonFlags common;
  std::string model{"on_off"};
  std::uint64_t n{500};
  std::uint64_t pool_size{10000};
  std::vector<double> alpha;
  std::vector<double> rho;
  std::uint64_t k_min{1};
  std::uint64_t k_max{35};
  std::uint64_t trials{200};
  CLI::Option* model_opt{};
  CLI::Option* n_opt{};
  CLI::Option* pool_opt{};
  CLI::Option* alpha_opt{};
  CLI::Option* rho_opt{};
  CLI::Option* k_min_opt{};
  CLI::Option* k_max_opt{};
  CLI::Option* trials_opt{};
};

inline int cmd_sweep(SweepFlags& f, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const json file = detail::load_config(f.common.config);
  detail::merge(file, f.model_opt, "model", f.model);
  detail::merge(file, f.n_opt, "n", f.n);
  detail::merge(file, f.pool_opt, "P", f.pool_size);
  detail::merge(file, f.alpha_opt, "alpha", f.alpha);
  detail::merge(file, f.rho_opt, "rho", f.rho);
  detail::merge(file, f.k_min_opt, "k-min", f.k_min);
  detail::merge(file, f.k_max_opt, "k-max", f.k_max);
  detail::merge(file, f.trials_opt, "trials", f.trials);
  detail::merge(file, f.common.seed_opt, "seed", f.common.seed);
  detail::merge(file, f.common.threads_opt, "threads", f.common.threads);

  if (f.model != "on_off" && f.model != "disk") {
    throw config_error("model must be on_off or disk");
  }
  if (f.trials == 0) {
    throw config_error("trials must be >= 1");
  }
  if (!f.alpha.empty() && !f.rho.empty()) {
    throw config_error("give either alpha or rho, not both");
  }

  SweepConfig config;
  config.model = f.model == "on_off" ? ModelKind::on_off : ModelKind::disk;
  config.n = f.n;
  config.pool_size = f.pool_size;
  config.k_min = f.k_min;
  config.k_max = f.k_max;
  config.trials = f.trials;
  config.master_seed = f.common.seed;
  config.threads = detail::resolve_thread_count(f.common.threads);
  if (config.model == ModelKind::on_off) {
    if (!f.rho.empty()) {
      throw config_error("rho applies to the disk model only");
    }
    config.channel_values = f.alpha.empty() ? std::vector<double>{0.2, 0.4, 0.6, 0.8} : f.alpha;
  } else if (!f.rho.empty()) {
    config.channel_values = f.rho;
  } else if (!f.alpha.empty()) {
    // matched ranges: pi rho^2 = alpha
    for (const double a : f.alpha) {
      config.channel_values.push_back(std::sqrt(a / std::numbers::pi));
    }
  } else {
    throw config_error("the disk model needs --rho or --alpha");
  }

  json resolved{{"model", f.model},  {"n", f.n},         {"P", f.pool_size}, {"k-min", f.k_min},
                {"k-max", f.k_max},  {"trials", f.trials}, {"seed", f.common.seed}, {"threads", config.threads}};
  if (!f.alpha.empty() || config.model == ModelKind::on_off) {
    resolved["alpha"] = config.model == ModelKind::on_off ? config.channel_values : f.alpha;
  } else {
    resolved["rho"] = f.rho;
  }

  const SweepReport report = run_sweep(config);
  const RunManifest manifest{"sweep", resolved, f.common.seed, kVersion, detail::seconds_since(start)};

  if (!f.common.out.empty()) {
    const std::filesystem::path dir{f.common.out};
    std::filesystem::create_directories(dir);
    std::ostringstream csv;
    write_sweep_csv(csv, report, manifest);
    detail::write_file(dir / "sweep.csv", csv.str());
    detail::write_file(dir / "sweep.json", sweep_json(report, manifest).dump(2) + "\n");
    for (const double value : config.channel_values) {
      std::ostringstream plot;
      write_plot_data(plot, rows_for(report, value));
      detail::write_file(dir / ("plot_" + to_string(config.model) + "_" + format_real(value) + ".dat"), plot.str());
    }
  }
  if (f.common.format == "json") {
    out << sweep_json(report, manifest).dump(2) << '\n';
  } else {
    write_sweep_csv(out, report, manifest);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct ThresholdFlags {
  CommonFlags common;
  std::uint64_t n{500};
  std::uint64_t pool_size{10000};
  double alpha{0.8};
  CLI::Option* n_opt{};
  CLI::Option* pool_opt{};
  CLI::Option* alpha_opt{};
};

inline int cmd_threshold(ThresholdFlags& f, std::ostream& out) {
  const json file = detail::load_config(f.common.config);
  detail::merge(file, f.n_opt, "n", f.n);
  detail::merge(file, f.pool_opt, "P", f.pool_size);
  detail::merge(file, f.alpha_opt, "alpha", f.alpha);

  const std::uint64_t k_star = threshold_K(f.n, f.pool_size, f.alpha);
  json table = json::array();
  std::ostringstream csv;
  csv << "threshold_K," << k_star << "\nK,critical_c\n";
  for (std::uint64_t k = k_star > 1 ? k_star - 1 : k_star; k <= std::min(k_star + 1, f.pool_size); ++k) {
    // critical_c takes the on/off parameters; alpha = 1 is allowed here as a boundary
    const double c = critical_c(f.n, ModelParams::widened(KeyParams{k, f.pool_size}, f.alpha));
    table.push_back(json{{"K", k}, {"critical_c", c}});
    csv << k << ',' << format_probability(c) << '\n';
  }
  if (f.common.format == "json") {
    out << json{{"n", f.n}, {"P", f.pool_size}, {"alpha", f.alpha}, {"threshold_K", k_star}, {"table", table}}.dump(2)
        << '\n';
  } else {
    out << csv.str();
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyFlags {
  CommonFlags common;
  std::string suite{"all"};
  bool mutant{false};
  CLI::Option* suite_opt{};
};

inline int cmd_verify(VerifyFlags& f, std::ostream& out) {
  const json file = detail::load_config(f.common.config);
  detail::merge(file, f.suite_opt, "suite", f.suite);
  if (f.suite != "bounds" && f.suite != "oracle" && f.suite != "all") {
    throw config_error("suite must be bounds, oracle or all");
  }
  SuiteResult total;
  const Mutation mutation = f.mutant ? Mutation::halve_tree_bound : Mutation::none;
  if (f.suite == "bounds" || f.suite == "all") {
    total += run_bound_suite(out, mutation);
  }
  if (f.suite == "oracle" || f.suite == "all") {
    total += run_oracle_suite(out);
  }
  out << (total.ok() ? "PASS" : "FAIL") << ": " << total.instances << " instances, " << total.counterexamples
      << " counterexamples\n";
  return total.ok() ? kOk : kVerificationFailure;
}

// ---------------------------------------------------------------------------

struct ZeroOneFlags {
  CommonFlags common;
  double c{2.0};
  double sigma{20.0};
  std::string alpha_rule{"constant:0.8"};
  std::vector<std::uint64_t> n_list{100, 200, 400, 800};
  std::uint64_t trials{200};
  CLI::Option* c_opt{};
  CLI::Option* sigma_opt{};
  CLI::Option* rule_opt{};
  CLI::Option* n_list_opt{};
  CLI::Option* trials_opt{};
};

inline int cmd_zeroone(ZeroOneFlags& f, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const json file = detail::load_config(f.common.config);
  detail::merge(file, f.c_opt, "c", f.c);
  detail::merge(file, f.sigma_opt, "sigma", f.sigma);
  detail::merge(file, f.rule_opt, "alpha-rule", f.alpha_rule);
  detail::merge(file, f.n_list_opt, "n-list", f.n_list);
  detail::merge(file, f.trials_opt, "trials", f.trials);
  detail::merge(file, f.common.seed_opt, "seed", f.common.seed);
  detail::merge(file, f.common.threads_opt, "threads", f.common.threads);
  if (f.trials == 0) {
    throw config_error("trials must be >= 1");
  }

  ZeroOneProbeConfig config;
  config.c = f.c;
  config.sigma = f.sigma;
  config.alpha_rule = detail::parse_alpha_rule(f.alpha_rule);
  config.n_list = f.n_list;
  config.trials = f.trials;
  config.master_seed = f.common.seed;
  config.threads = detail::resolve_thread_count(f.common.threads);

  const auto rows = zero_one_probe(config);
  const json resolved{{"c", f.c},           {"sigma", f.sigma}, {"alpha-rule", f.alpha_rule}, {"n-list", f.n_list},
                      {"trials", f.trials}, {"seed", f.common.seed}, {"threads", config.threads}};
  const RunManifest manifest{"zeroone", resolved, f.common.seed, kVersion, detail::seconds_since(start)};
  const std::string csv = "# manifest " + to_json(manifest).dump() + "\n" + zero_one_csv_body(rows);
  if (!f.common.out.empty()) {
    const std::filesystem::path dir{f.common.out};
    std::filesystem::create_directories(dir);
    detail::write_file(dir / "zeroone.csv", csv);
    detail::write_file(dir / "zeroone.json", zero_one_json(rows, manifest).dump(2) + "\n");
  }
  if (f.common.format == "json") {
    out << zero_one_json(rows, manifest).dump(2) << '\n';
  } else {
    out << csv;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

/// Parses arguments, runs one command, and maps failures to the documented exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"keygraph: connectivity of random key graphs under on/off and disk channels"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SweepFlags sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep over (channel value, K)");
  add_common_flags(*sweep_cmd, sweep.common);
  sweep.model_opt = sweep_cmd->add_option("--model", sweep.model, "on_off or disk");
  sweep.n_opt = sweep_cmd->add_option("--n", sweep.n, "Number of nodes");
  sweep.pool_opt = sweep_cmd->add_option("--P", sweep.pool_size, "Key pool size");
  sweep.alpha_opt = sweep_cmd->add_option("--alpha", sweep.alpha, "Channel probabilities (disk: matched ranges)");
  sweep.rho_opt = sweep_cmd->add_option("--rho", sweep.rho, "Transmission ranges (disk model)");
  sweep.k_min_opt = sweep_cmd->add_option("--k-min", sweep.k_min, "Smallest key ring size");
  sweep.k_max_opt = sweep_cmd->add_option("--k-max", sweep.k_max, "Largest key ring size");
  sweep.trials_opt = sweep_cmd->add_option("--trials", sweep.trials, "Samples per parameter point");

  ThresholdFlags threshold;
  auto* threshold_cmd = app.add_subcommand("threshold", "Smallest K above the connectivity threshold");
  add_common_flags(*threshold_cmd, threshold.common);
  threshold.n_opt = threshold_cmd->add_option("--n", threshold.n, "Number of nodes");
  threshold.pool_opt = threshold_cmd->add_option("--P", threshold.pool_size, "Key pool size");
  threshold.alpha_opt = threshold_cmd->add_option("--alpha", threshold.alpha, "Channel probability");

  VerifyFlags verify;
  auto* verify_cmd = app.add_subcommand("verify", "Exact verification of the probability bounds");
  add_common_flags(*verify_cmd, verify.common);
  verify.suite_opt = verify_cmd->add_option("--suite", verify.suite, "bounds, oracle or all");
  // harness self-check: a deliberately wrong bound must be reported
  verify_cmd->add_flag("--mutant", verify.mutant)->group("");

  ZeroOneFlags zeroone;
  auto* zeroone_cmd = app.add_subcommand("zeroone", "Probe the zero-one law along a scaling schedule");
  add_common_flags(*zeroone_cmd, zeroone.common);
  zeroone.c_opt = zeroone_cmd->add_option("--c", zeroone.c, "Target constant c");
  zeroone.sigma_opt = zeroone_cmd->add_option("--sigma", zeroone.sigma, "Pool growth constant, P = ceil(sigma n)");
  zeroone.rule_opt =
      zeroone_cmd->add_option("--alpha-rule", zeroone.alpha_rule, "constant:<a> | inverse_log:<a> | power:<gamma>");
  zeroone.n_list_opt = zeroone_cmd->add_option("--n-list", zeroone.n_list, "Increasing node counts");
  zeroone.trials_opt = zeroone_cmd->add_option("--trials", zeroone.trials, "Samples per n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep, out);
    }
    if (threshold_cmd->parsed()) {
      return cmd_threshold(threshold, out);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(verify, out);
    }
    return cmd_zeroone(zeroone, out);
  } catch (const config_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const no_threshold_error& e) {
    err << "no threshold: " << e.what() << '\n';
    return kNoThreshold;
  } catch (const infeasible_error& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const precondition_error& e) {
    err << "infeasible parameters: " << e.what() << '\n';
    return kInfeasible;
  } catch (const budget_exceeded_error& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  }
}

}  // namespace keygraph::cli
