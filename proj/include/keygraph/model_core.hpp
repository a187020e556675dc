#pragma once

// Closed-form probabilities, thresholds and scaling schedules for the
// intersection of a random key graph with an on/off (Erdos-Renyi) channel.
// Every "log" is the natural logarithm.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "keygraph/errors.hpp"

namespace keygraph {

/// Key-ring size and key-pool size of the Eschenauer-Gligor scheme.
class KeyParams {
 public:
  KeyParams(std::uint64_t ring_size, std::uint64_t pool_size)
      : ring_size_{ring_size}, pool_size_{pool_size} {
    detail::require(ring_size >= 1, "KeyParams: key ring size must be >= 1");
    detail::require(ring_size <= pool_size, "KeyParams: key ring size must not exceed the pool size");
  }

  [[nodiscard]] constexpr std::uint64_t ring_size() const noexcept { return ring_size_; }
  [[nodiscard]] constexpr std::uint64_t pool_size() const noexcept { return pool_size_; }

  friend constexpr bool operator==(const KeyParams&, const KeyParams&) = default;

 private:
  std::uint64_t ring_size_;
  std::uint64_t pool_size_;
};

/// A real number in [0, 1].
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_{value} {
    detail::require(value >= 0.0 && value <= 1.0, "Probability: value outside [0, 1]");
  }

  [[nodiscard]] constexpr double value() const noexcept { return value_; }

  friend constexpr auto operator<=>(const Probability&, const Probability&) = default;

 private:
  double value_{0.0};
};

/// Key parameters plus the channel-on probability of the on/off model.
///
/// The regular constructor enforces 0 < alpha < 1. `widened` admits the
/// closed interval so that the degenerate channels (always off, always on)
/// can be exercised directly.
class ModelParams {
 public:
  ModelParams(KeyParams key, double alpha) : key_{key}, alpha_{alpha} {
    detail::require(alpha > 0.0 && alpha < 1.0, "ModelParams: alpha must lie in (0, 1)");
  }

  [[nodiscard]] static ModelParams widened(KeyParams key, double alpha) {
    detail::require(alpha >= 0.0 && alpha <= 1.0, "ModelParams: alpha must lie in [0, 1]");
    return ModelParams{key, alpha, unchecked_tag{}};
  }

  [[nodiscard]] constexpr const KeyParams& key() const noexcept { return key_; }
  [[nodiscard]] constexpr double alpha() const noexcept { return alpha_; }

  friend constexpr bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  struct unchecked_tag {};
  ModelParams(KeyParams key, double alpha, unchecked_tag) : key_{key}, alpha_{alpha} {}

  KeyParams key_;
  double alpha_;
};

/// Key parameters plus the transmission range of the disk model on the unit torus.
/// The range stays below 0.5 so that a disk of radius rho has area exactly pi*rho^2.
class DiskParams {
 public:
  DiskParams(KeyParams key, double rho) : key_{key}, rho_{rho} {
    detail::require(rho > 0.0 && rho < 0.5, "DiskParams: rho must lie in (0, 0.5)");
  }

  /// Range matched to an on/off channel: pi * rho^2 == alpha.
  [[nodiscard]] static DiskParams matched(KeyParams key, double alpha) {
    detail::require(alpha > 0.0, "DiskParams::matched: alpha must be positive");
    return DiskParams{key, std::sqrt(alpha / std::numbers::pi)};
  }

  [[nodiscard]] constexpr const KeyParams& key() const noexcept { return key_; }
  [[nodiscard]] constexpr double rho() const noexcept { return rho_; }
  [[nodiscard]] double matched_alpha() const noexcept { return std::numbers::pi * rho_ * rho_; }

  friend constexpr bool operator==(const DiskParams&, const DiskParams&) = default;

 private:
  KeyParams key_;
  double rho_;
};

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_{0.0};
  double compensation_{0.0};
};

/// log( C(P - s, K) / C(P, K) ) = sum_{l<K} log(1 - s/(P-l)), valid for s + K <= P.
inline double log_avoidance(std::uint64_t ring, std::uint64_t pool, std::uint64_t marked) {
  if (marked == 0) {
    return 0.0;
  }
  if (marked + ring > pool) {
    return -std::numeric_limits<double>::infinity();
  }
  CompensatedSum acc;
  const auto s = static_cast<double>(marked);
  for (std::uint64_t l = 0; l < ring; ++l) {
    acc.add(std::log1p(-s / static_cast<double>(pool - l)));
  }
  return acc.value();
}

}  // namespace detail

/// Natural log of q(K,P), the probability that two independent key rings are disjoint.
/// Returns -infinity when P < 2K.
[[nodiscard]] inline double log_q_theta(const KeyParams& key) {
  return detail::log_avoidance(key.ring_size(), key.pool_size(), key.ring_size());
}

/// q(K,P) = C(P-K, K) / C(P, K); exactly zero when P < 2K.
[[nodiscard]] inline Probability q_theta(const KeyParams& key) {
  return Probability{std::exp(log_q_theta(key))};
}

/// 1 - q(K,P), evaluated with expm1 so that small values keep full relative precision.
[[nodiscard]] inline Probability one_minus_q(const KeyParams& key) {
  return Probability{-std::expm1(log_q_theta(key))};
}

/// Probability that a uniform K-subset of the pool avoids a fixed set of `marked` keys:
/// C(P - s, K) / C(P, K), and 0 once s > P - K.
[[nodiscard]] inline Probability avoidance_probability(const KeyParams& key, std::uint64_t marked) {
  return Probability{std::exp(detail::log_avoidance(key.ring_size(), key.pool_size(), marked))};
}

/// alpha * (1 - q): the edge probability of the intersection graph.
[[nodiscard]] inline Probability edge_probability(const ModelParams& params) {
  return Probability{params.alpha() * one_minus_q(params.key()).value()};
}

/// Smallest K >= 1 with 1 - q(K,P) > (1/alpha) * log(n) / n (strict).
/// Throws no_threshold_error when the right-hand side is >= 1.
[[nodiscard]] inline std::uint64_t threshold_K(std::uint64_t n, std::uint64_t pool_size, double alpha) {
  detail::require(n >= 2, "threshold_K: n must be >= 2");
  detail::require(pool_size >= 1, "threshold_K: pool size must be >= 1");
  detail::require(alpha > 0.0 && alpha <= 1.0, "threshold_K: alpha must lie in (0, 1]");
  const double nd = static_cast<double>(n);
  const double rhs = std::log(nd) / nd / alpha;
  if (!(rhs < 1.0)) {
    throw no_threshold_error("threshold_K: (1/alpha) log(n)/n = " + std::to_string(rhs) +
                             " >= 1, no key ring size suffices");
  }
  const auto satisfies = [&](std::uint64_t k) {
    return one_minus_q(KeyParams{k, pool_size}).value() > rhs;
  };
  // 1 - q is nondecreasing in K, so the satisfying set is a suffix of [1, P].
  if (!satisfies(pool_size)) {
    throw no_threshold_error("threshold_K: no K <= P satisfies the threshold inequality");
  }
  std::uint64_t lo = 1;
  std::uint64_t hi = pool_size;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (satisfies(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

/// c_n = alpha (1 - q) n / log n; the zero-one threshold sits at c = 1.
[[nodiscard]] inline double critical_c(std::uint64_t n, const ModelParams& params) {
  detail::require(n >= 2, "critical_c: n must be >= 2");
  const double nd = static_cast<double>(n);
  return edge_probability(params).value() * nd / std::log(nd);
}

/// E[number of isolated nodes] = n (1 - alpha(1 - q))^(n-1).
[[nodiscard]] inline double expected_isolated(std::uint64_t n, const ModelParams& params) {
  detail::require(n >= 1, "expected_isolated: n must be >= 1");
  const double p = edge_probability(params).value();
  const double nd = static_cast<double>(n);
  if (p >= 1.0) {
    return n == 1 ? 1.0 : 0.0;
  }
  return nd * std::exp((nd - 1.0) * std::log1p(-p));
}

// ---------------------------------------------------------------------------
// Scaling schedules

/// Declared limit of alpha_n * log n as n grows.
struct AlphaLimit {
  enum class Kind { zero, finite, infinite };
  Kind kind{Kind::infinite};
  double value{0.0};  // meaningful for Kind::finite only

  friend bool operator==(const AlphaLimit&, const AlphaLimit&) = default;
};

/// Channel probability as a function of n.
class AlphaRule {
 public:
  enum class Kind { constant, inverse_log, power };

  /// alpha_n = alpha0.
  [[nodiscard]] static AlphaRule constant(double alpha0) {
    detail::require(alpha0 > 0.0 && alpha0 < 1.0, "AlphaRule::constant: alpha0 must lie in (0, 1)");
    return AlphaRule{Kind::constant, alpha0};
  }
  /// alpha_n = a / log n.
  [[nodiscard]] static AlphaRule inverse_log(double a) {
    detail::require(a > 0.0, "AlphaRule::inverse_log: a must be positive");
    return AlphaRule{Kind::inverse_log, a};
  }
  /// alpha_n = n^(-gamma), 0 < gamma < 1.
  [[nodiscard]] static AlphaRule power(double gamma) {
    detail::require(gamma > 0.0 && gamma < 1.0, "AlphaRule::power: gamma must lie in (0, 1)");
    return AlphaRule{Kind::power, gamma};
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double parameter() const noexcept { return parameter_; }

  [[nodiscard]] double at(std::uint64_t n) const {
    const double nd = static_cast<double>(n);
    switch (kind_) {
      case Kind::constant:
        return parameter_;
      case Kind::inverse_log:
        return parameter_ / std::log(nd);
      case Kind::power:
        return std::pow(nd, -parameter_);
    }
    return parameter_;
  }

  /// Symbolic lim alpha_n log n.
  [[nodiscard]] AlphaLimit limit() const noexcept {
    switch (kind_) {
      case Kind::constant:
        return {AlphaLimit::Kind::infinite, 0.0};
      case Kind::inverse_log:
        return {AlphaLimit::Kind::finite, parameter_};
      case Kind::power:
        return {AlphaLimit::Kind::zero, 0.0};
    }
    return {};
  }

  [[nodiscard]] std::string describe() const {
    switch (kind_) {
      case Kind::constant:
        return "constant:" + std::to_string(parameter_);
      case Kind::inverse_log:
        return "inverse_log:" + std::to_string(parameter_);
      case Kind::power:
        return "power:" + std::to_string(parameter_);
    }
    return {};
  }

 private:
  AlphaRule(Kind kind, double parameter) : kind_{kind}, parameter_{parameter} {}

  Kind kind_;
  double parameter_;
};

/// Relative tolerance |c_n - c| <= tol * c accepted by scaling_schedule.
inline constexpr double kScheduleTolerance = 0.10;

struct ScalingPoint {
  std::uint64_t n;
  ModelParams params;
  double c;           // target constant
  double sigma;       // pool growth constant, P >= sigma * n
  double achieved_c;  // alpha (1 - q) n / log n actually realized
  double tolerance;   // relative tolerance the point was accepted under
  AlphaLimit alpha_star;
};

/// Builds one parameter point per n: P = ceil(sigma n), alpha from the rule, and the
/// K in [2, P] whose alpha(1 - q) is closest to c log(n)/n.
/// Throws infeasible_error when the closest K misses c by more than 10%.
[[nodiscard]] inline std::vector<ScalingPoint> scaling_schedule(double c, double sigma, const AlphaRule& rule,
                                                                const std::vector<std::uint64_t>& n_list) {
  detail::require(c > 0.0, "scaling_schedule: c must be positive");
  detail::require(sigma > 0.0, "scaling_schedule: sigma must be positive");
  std::vector<ScalingPoint> points;
  points.reserve(n_list.size());
  for (const std::uint64_t n : n_list) {
    detail::require(n >= 2, "scaling_schedule: every n must be >= 2");
    const double alpha = rule.at(n);
    detail::require(alpha > 0.0 && alpha < 1.0,
                    "scaling_schedule: alpha_n outside (0, 1) at n = " + std::to_string(n));
    const double nd = static_cast<double>(n);
    const auto pool = static_cast<std::uint64_t>(std::ceil(sigma * nd));
    if (pool < 2) {
      throw infeasible_error("scaling_schedule: pool size below 2 at n = " + std::to_string(n));
    }
    const double target = c * std::log(nd) / nd;
    const auto edge = [&](std::uint64_t k) { return alpha * one_minus_q(KeyParams{k, pool}).value(); };

    // smallest K in [2, P] with edge(K) >= target, or P when none reaches it
    std::uint64_t lo = 2;
    std::uint64_t hi = pool;
    while (lo < hi) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (edge(mid) >= target) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    std::uint64_t best = lo;
    if (lo > 2 && std::fabs(edge(lo - 1) - target) <= std::fabs(edge(lo) - target)) {
      best = lo - 1;
    }
    ModelParams params{KeyParams{best, pool}, alpha};
    const double achieved = critical_c(n, params);
    if (std::fabs(achieved - c) > kScheduleTolerance * c) {
      throw infeasible_error("scaling_schedule: best K = " + std::to_string(best) + " at n = " + std::to_string(n) +
                             " gives c_n = " + std::to_string(achieved) + ", more than 10% from c = " +
                             std::to_string(c));
    }
    points.push_back(ScalingPoint{n, params, c, sigma, achieved, kScheduleTolerance, rule.limit()});
  }
  return points;
}

}  // namespace keygraph
