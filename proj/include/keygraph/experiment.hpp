#pragma once

// Monte Carlo estimation of connectivity and isolated-node probabilities.
//
// Trial t of parameter point p draws from RngStream(master_seed, mix64(p * 2^32 + t)).
// Trials may run on any number of threads; outcomes are reduced in trial order, so
// every estimate is a function of (configuration, master_seed) alone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iterator>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "keygraph/analysis.hpp"
#include "keygraph/errors.hpp"
#include "keygraph/model_core.hpp"
#include "keygraph/rng.hpp"
#include "keygraph/samplers.hpp"

namespace keygraph {

/// Channel model of a parameter point: on/off (ModelParams) or torus disk (DiskParams).
using ChannelModel = std::variant<ModelParams, DiskParams>;

enum class ModelKind { on_off, disk };

[[nodiscard]] inline ModelKind kind_of(const ChannelModel& model) noexcept {
  return std::holds_alternative<ModelParams>(model) ? ModelKind::on_off : ModelKind::disk;
}

[[nodiscard]] inline const KeyParams& key_of(const ChannelModel& model) noexcept {
  return std::visit([](const auto& p) -> const KeyParams& { return p.key(); }, model);
}

/// alpha for the on/off model, rho for the disk model.
[[nodiscard]] inline double channel_value(const ChannelModel& model) noexcept {
  if (const auto* on_off = std::get_if<ModelParams>(&model)) {
    return on_off->alpha();
  }
  return std::get<DiskParams>(model).rho();
}

[[nodiscard]] inline std::string to_string(ModelKind kind) { return kind == ModelKind::on_off ? "on_off" : "disk"; }

struct TrialOutcome {
  bool connected{false};
  bool no_isolated{false};
  std::size_t isolated_count{0};
  std::size_t min_degree{0};

  friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

/// Samples one intersection graph from `stream` and reports its structure.
[[nodiscard]] inline TrialOutcome run_trial(std::size_t n, const ChannelModel& model, RngStream stream) {
  const Graph g = std::visit(
      [&](const auto& params) {
        if constexpr (std::is_same_v<std::decay_t<decltype(params)>, ModelParams>) {
          return sample_kg_intersection(n, params, stream);
        } else {
          return sample_kh_intersection(n, params, stream);
        }
      },
      model);
  const StructureSummary summary = analyze(g);
  return TrialOutcome{summary.is_connected, summary.isolated_count == 0, summary.isolated_count, summary.min_degree};
}

/// 95% Wilson score interval for `successes` out of `trials`.
[[nodiscard]] inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                                               double z = 1.959963984540054) {
  detail::require(trials >= 1, "wilson_interval: trials must be >= 1");
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  // clamp so that ci_low <= p <= ci_high survives rounding at p = 0 and p = 1
  return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

struct PointEstimate {
  ChannelModel params;
  std::uint64_t n{0};
  std::uint64_t trials{0};
  std::uint64_t count_connected{0};
  std::uint64_t count_no_isolated{0};
  std::uint64_t count_equivalent{0};  // trials with connected == no_isolated
  double p_connected{0.0};
  double p_no_isolated{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  double equivalence_rate{0.0};
  double mean_isolated{0.0};
  double var_isolated{0.0};  // unbiased sample variance of the isolated count
};

[[nodiscard]] inline unsigned resolve_threads(unsigned requested) noexcept { return std::max(1U, requested); }

/// Runs `trials` independent trials of one parameter point.
[[nodiscard]] inline PointEstimate run_point(std::size_t n, const ChannelModel& model, std::uint64_t trials,
                                             std::uint64_t master_seed, std::uint64_t point_index = 0,
                                             unsigned threads = 1) {
  detail::require(trials >= 1, "run_point: trials must be >= 1");
  std::vector<TrialOutcome> outcomes(trials);
  const auto worker = [&](std::uint64_t first, std::uint64_t stride) {
    for (std::uint64_t t = first; t < trials; t += stride) {
      outcomes[t] = run_trial(n, model, RngStream{master_seed, trial_stream_id(point_index, t)});
    }
  };
  const std::uint64_t workers = std::min<std::uint64_t>(resolve_threads(threads), trials);
  if (workers == 1) {
    worker(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          worker(w, workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
    for (const auto& e : errors) {
      if (e) {
        std::rethrow_exception(e);
      }
    }
  }

  PointEstimate est{model, n, trials};
  double sum = 0.0;
  for (const TrialOutcome& o : outcomes) {
    est.count_connected += o.connected ? 1 : 0;
    est.count_no_isolated += o.no_isolated ? 1 : 0;
    est.count_equivalent += o.connected == o.no_isolated ? 1 : 0;
    sum += static_cast<double>(o.isolated_count);
  }
  const double nt = static_cast<double>(trials);
  est.mean_isolated = sum / nt;
  if (trials > 1) {
    double squares = 0.0;
    for (const TrialOutcome& o : outcomes) {
      const double d = static_cast<double>(o.isolated_count) - est.mean_isolated;
      squares += d * d;
    }
    est.var_isolated = squares / (nt - 1.0);
  }
  est.p_connected = static_cast<double>(est.count_connected) / nt;
  est.p_no_isolated = static_cast<double>(est.count_no_isolated) / nt;
  est.equivalence_rate = static_cast<double>(est.count_equivalent) / nt;
  std::tie(est.ci_low, est.ci_high) = wilson_interval(est.count_connected, trials);
  return est;
}

// ---------------------------------------------------------------------------
// Sweeps over (channel value, K)

struct SweepConfig {
  ModelKind model{ModelKind::on_off};
  std::uint64_t n{500};
  std::uint64_t pool_size{10000};
  std::vector<double> channel_values;  // alpha list (on_off) or rho list (disk)
  std::uint64_t k_min{1};
  std::uint64_t k_max{35};  // k_max < k_min denotes an empty range
  std::uint64_t trials{200};
  std::uint64_t master_seed{1};
  unsigned threads{1};

  [[nodiscard]] bool empty_range() const noexcept { return k_max < k_min; }

  void validate() const {
    detail::require(n >= 2, "SweepConfig: n must be >= 2");
    detail::require(trials >= 1, "SweepConfig: trials must be >= 1");
    detail::require(pool_size >= 1, "SweepConfig: pool size must be >= 1");
    if (!empty_range()) {
      detail::require(k_min >= 1 && k_max <= pool_size, "SweepConfig: K range must lie within [1, P]");
    }
    for (const double v : channel_values) {
      if (model == ModelKind::on_off) {
        detail::require(v > 0.0 && v < 1.0, "SweepConfig: alpha values must lie in (0, 1)");
      } else {
        detail::require(v > 0.0 && v < 0.5, "SweepConfig: rho values must lie in (0, 0.5)");
      }
    }
  }

  [[nodiscard]] ChannelModel point(double value, std::uint64_t k) const {
    const KeyParams key{k, pool_size};
    if (model == ModelKind::on_off) {
      return ModelParams{key, value};
    }
    return DiskParams{key, value};
  }

  /// Channel probability used for the threshold annotation (alpha, or pi rho^2 for the disk model).
  [[nodiscard]] double matched_alpha(double value) const noexcept {
    return model == ModelKind::on_off ? value : std::numbers::pi * value * value;
  }
};

struct SweepRow {
  double channel_value{0.0};
  std::uint64_t k{0};
  std::optional<std::uint64_t> threshold_k;  // absent when no K satisfies the threshold
  PointEstimate estimate;
};

struct SweepReport {
  SweepConfig config;
  std::vector<SweepRow> rows;  // ordered by (channel value index, K)
};

/// threshold_K, or nullopt when none exists.
[[nodiscard]] inline std::optional<std::uint64_t> try_threshold_K(std::uint64_t n, std::uint64_t pool_size,
                                                                  double alpha) {
  try {
    return threshold_K(n, pool_size, alpha);
  } catch (const no_threshold_error&) {
    return std::nullopt;
  }
}

[[nodiscard]] inline SweepReport run_sweep(const SweepConfig& config) {
  config.validate();
  SweepReport report{config, {}};
  if (config.empty_range()) {
    return report;
  }
  const std::uint64_t span = config.k_max - config.k_min + 1;
  report.rows.reserve(config.channel_values.size() * span);
  for (std::size_t ci = 0; ci < config.channel_values.size(); ++ci) {
    const double value = config.channel_values[ci];
    const auto threshold = try_threshold_K(config.n, config.pool_size, std::min(1.0, config.matched_alpha(value)));
    for (std::uint64_t k = config.k_min; k <= config.k_max; ++k) {
      const std::uint64_t point_index = ci * span + (k - config.k_min);
      report.rows.push_back(SweepRow{
          value, k, threshold,
          run_point(config.n, config.point(value, k), config.trials, config.master_seed, point_index, config.threads)});
    }
  }
  return report;
}

/// Rows of `report` for one channel value, in K order.
[[nodiscard]] inline std::vector<SweepRow> rows_for(const SweepReport& report, double value) {
  std::vector<SweepRow> out;
  std::copy_if(report.rows.begin(), report.rows.end(), std::back_inserter(out),
               [&](const SweepRow& r) { return r.channel_value == value; });
  return out;
}

/// Smallest K whose p_connected reaches `level`, or nullopt when the curve never does.
[[nodiscard]] inline std::optional<std::uint64_t> crossing_K(const std::vector<SweepRow>& curve, double level = 0.5) {
  for (const SweepRow& r : curve) {
    if (r.estimate.p_connected >= level) {
      return r.k;
    }
  }
  return std::nullopt;
}

/// Sum of |y_i - fit_i| for the least-squares nondecreasing fit (pool adjacent violators).
[[nodiscard]] inline double isotonic_residual(const std::vector<double>& values) {
  struct Block {
    double mean;
    std::size_t count;
  };
  std::vector<Block> blocks;
  for (const double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block last = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const auto total = static_cast<double>(prev.count + last.count);
      prev.mean = (prev.mean * static_cast<double>(prev.count) + last.mean * static_cast<double>(last.count)) / total;
      prev.count += last.count;
    }
  }
  double residual = 0.0;
  std::size_t i = 0;
  for (const Block& b : blocks) {
    for (std::size_t k = 0; k < b.count; ++k, ++i) {
      residual += std::fabs(values[i] - b.mean);
    }
  }
  return residual;
}

// ---------------------------------------------------------------------------
// Zero-one law probes

struct ZeroOneProbeConfig {
  double c{1.0};
  double sigma{20.0};
  AlphaRule alpha_rule{AlphaRule::constant(0.8)};
  std::vector<std::uint64_t> n_list;
  std::uint64_t trials{200};
  std::uint64_t master_seed{1};
  unsigned threads{1};

  void validate() const {
    detail::require(c > 0.0, "ZeroOneProbeConfig: c must be positive");
    detail::require(sigma > 0.0, "ZeroOneProbeConfig: sigma must be positive");
    detail::require(trials >= 1, "ZeroOneProbeConfig: trials must be >= 1");
    detail::require(!n_list.empty(), "ZeroOneProbeConfig: n list is empty");
    detail::require(std::adjacent_find(n_list.begin(), n_list.end(), std::greater_equal<>{}) == n_list.end(),
                    "ZeroOneProbeConfig: n list must be strictly increasing");
  }
};

struct ZeroOneRow {
  ScalingPoint point;
  PointEstimate estimate;
};

/// Estimates P(connected) and P(no isolated node) along a scaling schedule.
/// Throws infeasible_error when the schedule cannot be built.
[[nodiscard]] inline std::vector<ZeroOneRow> zero_one_probe(const ZeroOneProbeConfig& config) {
  config.validate();
  const auto schedule = scaling_schedule(config.c, config.sigma, config.alpha_rule, config.n_list);
  std::vector<ZeroOneRow> rows;
  rows.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const ScalingPoint& point = schedule[i];
    rows.push_back(ZeroOneRow{point, run_point(point.n, point.params, config.trials, config.master_seed, i,
                                               config.threads)});
  }
  return rows;
}

}  // namespace keygraph
