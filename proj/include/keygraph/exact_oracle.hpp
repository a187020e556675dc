#pragma once

// Exact rational ground truth for tiny instances, and exact verifiers for the
// inequalities used in the zero-one law proofs.
//
// Every comparison here is decided in exact arithmetic. Fractional powers are
// cleared by raising both sides to the denominator of the exponent, and the one
// transcendental term (an exponential) is replaced by a Taylor partial sum, which
// is a lower bound; a `true` answer is therefore always sound.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "keygraph/errors.hpp"
#include "keygraph/model_core.hpp"

namespace keygraph {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Largest number of (key assignment, channel state) configurations enumerate_exact will visit.
inline constexpr double kEnumerationBudget = 1e8;

[[nodiscard]] inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  BigInt out = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

[[nodiscard]] inline Rational rational_pow(const Rational& base, std::uint64_t exponent) {
  Rational out = 1;
  Rational b = base;
  while (exponent != 0) {
    if ((exponent & 1U) != 0) {
      out *= b;
    }
    b *= b;
    exponent >>= 1U;
  }
  return out;
}

/// C(P - s, K) / C(P, K), exactly; zero once s > P - K.
[[nodiscard]] inline Rational exact_avoidance(const KeyParams& key, std::uint64_t marked) {
  if (marked > key.pool_size() - key.ring_size()) {
    return 0;
  }
  return Rational{binomial(key.pool_size() - marked, key.ring_size()), binomial(key.pool_size(), key.ring_size())};
}

/// q(K, P) = C(P - K, K) / C(P, K), exactly.
[[nodiscard]] inline Rational exact_q(const KeyParams& key) { return exact_avoidance(key, key.ring_size()); }

/// Key parameters with an exact channel probability in [0, 1].
class ExactModel {
 public:
  ExactModel(KeyParams key, Rational alpha) : key_{key}, alpha_{std::move(alpha)} {
    detail::require(alpha_ >= 0 && alpha_ <= 1, "ExactModel: alpha must lie in [0, 1]");
  }

  [[nodiscard]] const KeyParams& key() const noexcept { return key_; }
  [[nodiscard]] const Rational& alpha() const noexcept { return alpha_; }

  /// alpha (1 - q)
  [[nodiscard]] Rational edge_probability() const { return alpha_ * (1 - exact_q(key_)); }

 private:
  KeyParams key_;
  Rational alpha_;
};

/// Closed form n (1 - alpha(1 - q))^(n-1) in exact arithmetic.
[[nodiscard]] inline Rational exact_expected_isolated(std::uint64_t n, const ExactModel& model) {
  detail::require(n >= 1, "exact_expected_isolated: n must be >= 1");
  return Rational{n} * rational_pow(1 - model.edge_probability(), n - 1);
}

struct ExactReport {
  Rational p_connected;
  Rational p_no_isolated;
  Rational expected_isolated;
  Rational cross_moment;  // E[chi_1 chi_2]: nodes 0 and 1 both isolated
  Rational total_mass;    // sums to exactly 1
};

namespace detail {

/// All K-subsets of [0, P) in lexicographic order, each sorted.
inline std::vector<std::vector<std::uint32_t>> all_subsets(std::uint32_t pool, std::uint32_t k) {
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> current(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    current[i] = i;
  }
  for (;;) {
    out.push_back(current);
    std::int64_t pos = static_cast<std::int64_t>(k) - 1;
    while (pos >= 0 && current[pos] == pool - k + static_cast<std::uint32_t>(pos)) {
      --pos;
    }
    if (pos < 0) {
      return out;
    }
    ++current[pos];
    for (auto i = static_cast<std::size_t>(pos) + 1; i < k; ++i) {
      current[i] = current[i - 1] + 1;
    }
  }
}

inline bool rings_share(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      return true;
    }
    (a[i] < b[j]) ? ++i : ++j;
  }
  return false;
}

/// Number of configurations visited by enumerate_exact, saturating above the budget.
inline double enumeration_size(std::uint64_t n, const KeyParams& key) {
  const double rings = binomial(key.pool_size(), key.ring_size()).convert_to<double>();
  double total = 1.0;
  for (std::uint64_t i = 0; i < n && total <= kEnumerationBudget * 2; ++i) {
    total *= rings;
  }
  const std::uint64_t pairs = n * (n - 1) / 2;
  for (std::uint64_t i = 0; i < pairs && total <= kEnumerationBudget * 2; ++i) {
    total *= 2.0;
  }
  return total;
}

}  // namespace detail

/// Exhaustive sum over every key-ring tuple and every channel-state vector.
/// Throws budget_exceeded_error past kEnumerationBudget configurations.
[[nodiscard]] inline ExactReport enumerate_exact(std::uint64_t n, const ExactModel& model) {
  detail::require(n >= 2, "enumerate_exact: n must be >= 2");
  const KeyParams& key = model.key();
  if (detail::enumeration_size(n, key) > kEnumerationBudget) {
    throw budget_exceeded_error("enumerate_exact: instance exceeds the enumeration budget of 1e8 configurations");
  }
  const auto subsets =
      detail::all_subsets(static_cast<std::uint32_t>(key.pool_size()), static_cast<std::uint32_t>(key.ring_size()));
  const std::size_t radix = subsets.size();
  const std::size_t pairs = n * (n - 1) / 2;

  // pair index p <-> (i, j), i < j
  std::vector<std::pair<std::size_t, std::size_t>> pair_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      pair_nodes.emplace_back(i, j);
    }
  }

  // Counters indexed by the number of "on" channels; each configuration with k
  // channels on has weight alpha^k (1 - alpha)^(pairs - k) / C(P, K)^n.
  std::vector<std::uint64_t> connected(pairs + 1, 0);
  std::vector<std::uint64_t> no_isolated(pairs + 1, 0);
  std::vector<std::uint64_t> isolated_sum(pairs + 1, 0);
  std::vector<std::uint64_t> both_isolated(pairs + 1, 0);
  std::vector<std::uint64_t> configurations(pairs + 1, 0);

  std::vector<std::size_t> digits(n, 0);  // mixed-radix counter over ring choices
  std::vector<std::uint32_t> adjacency(n);
  for (;;) {
    std::uint64_t shared = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
      const auto [i, j] = pair_nodes[p];
      if (detail::rings_share(subsets[digits[i]], subsets[digits[j]])) {
        shared |= std::uint64_t{1} << p;
      }
    }
    for (std::uint64_t channel = 0; channel < (std::uint64_t{1} << pairs); ++channel) {
      const std::uint64_t edges = shared & channel;
      std::fill(adjacency.begin(), adjacency.end(), 0U);
      for (std::size_t p = 0; p < pairs; ++p) {
        if ((edges >> p) & 1U) {
          const auto [i, j] = pair_nodes[p];
          adjacency[i] |= 1U << j;
          adjacency[j] |= 1U << i;
        }
      }
      std::uint32_t reached = 1;
      std::uint32_t frontier = 1;
      while (frontier != 0) {
        std::uint32_t next = 0;
        for (std::size_t v = 0; v < n; ++v) {
          if ((frontier >> v) & 1U) {
            next |= adjacency[v];
          }
        }
        frontier = next & ~reached;
        reached |= next;
      }
      std::uint64_t isolated = 0;
      for (std::size_t v = 0; v < n; ++v) {
        isolated += adjacency[v] == 0 ? 1 : 0;
      }
      const auto on = static_cast<std::size_t>(std::popcount(channel));
      ++configurations[on];
      connected[on] += reached == (std::uint32_t{1} << n) - 1 ? 1 : 0;
      no_isolated[on] += isolated == 0 ? 1 : 0;
      isolated_sum[on] += isolated;
      both_isolated[on] += (adjacency[0] == 0 && adjacency[1] == 0) ? 1 : 0;
    }
    std::size_t pos = 0;
    while (pos < n && ++digits[pos] == radix) {
      digits[pos++] = 0;
    }
    if (pos == n) {
      break;
    }
  }

  const Rational assignments = Rational{rational_pow(Rational{radix}, n)};
  ExactReport report;
  for (std::size_t on = 0; on <= pairs; ++on) {
    const Rational weight = rational_pow(model.alpha(), on) * rational_pow(1 - model.alpha(), pairs - on) / assignments;
    report.p_connected += weight * connected[on];
    report.p_no_isolated += weight * no_isolated[on];
    report.expected_isolated += weight * isolated_sum[on];
    report.cross_moment += weight * both_isolated[on];
    report.total_mass += weight * configurations[on];
  }
  return report;
}

/// Exact check of C(P - ceil(aK), K) / C(P, K) <= q^a for a rational a >= 1.
[[nodiscard]] inline bool verify_ratio_bound(const KeyParams& key, const Rational& a) {
  detail::require(a >= 1, "verify_ratio_bound: a must be >= 1");
  const BigInt num = numerator(a);
  const BigInt den = denominator(a);
  const BigInt scaled = num * key.ring_size();
  const BigInt marked_big = (scaled + den - 1) / den;  // ceil(a K)
  const Rational q = exact_q(key);
  if (marked_big + key.ring_size() > key.pool_size()) {
    return q >= 0;  // left side is zero
  }
  const Rational lhs = exact_avoidance(key, marked_big.convert_to<std::uint64_t>());
  // lhs <= q^(m/d)  <=>  lhs^d <= q^m  (both sides nonnegative)
  return rational_pow(lhs, den.convert_to<std::uint64_t>()) <= rational_pow(q, num.convert_to<std::uint64_t>());
}

/// Exact check of 1 - q^lambda >= lambda (1 - q) for a rational 0 < lambda < 1.
/// Enforces only the hypothesis K <= 2P.
[[nodiscard]] inline bool verify_lambda_bound(const KeyParams& key, const Rational& lambda) {
  detail::require(lambda > 0 && lambda < 1, "verify_lambda_bound: lambda must lie in (0, 1)");
  detail::require(key.ring_size() <= 2 * key.pool_size(), "verify_lambda_bound: requires K <= 2P");
  const Rational q = exact_q(key);
  const Rational rhs = 1 - lambda * (1 - q);  // q^lambda <= rhs
  const auto m = numerator(lambda).convert_to<std::uint64_t>();
  const auto d = denominator(lambda).convert_to<std::uint64_t>();
  return rational_pow(q, m) <= rational_pow(rhs, d);
}

/// r^(r-2) (alpha (1 - q))^(r-1): the spanning-tree union bound on P(r nodes connected).
[[nodiscard]] inline Rational tree_bound(std::uint64_t r, const ExactModel& model) {
  return Rational{rational_pow(Rational{r}, r - 2)} * rational_pow(model.edge_probability(), r - 1);
}

/// Exact P(r-node intersection graph connected) <= tree_bound(r).
/// `bound_scale` rescales the bound; anything other than 1 is only for harness self-checks.
[[nodiscard]] inline bool verify_tree_bound(std::uint64_t r, const ExactModel& model,
                                            const Rational& bound_scale = Rational{1}) {
  detail::require(r >= 2, "verify_tree_bound: r must be >= 2");
  return enumerate_exact(r, model).p_connected <= bound_scale * tree_bound(r, model);
}

/// Taylor partial sum of exp(x) through x^terms / terms!; a lower bound for x >= 0.
[[nodiscard]] inline Rational exp_lower_bound(const Rational& x, std::uint64_t terms) {
  Rational sum = 1;
  Rational term = 1;
  for (std::uint64_t k = 1; k <= terms; ++k) {
    term *= x;
    term /= k;
    sum += term;
  }
  return sum;
}

/// Outcome of the second-moment check together with the exact left side.
struct SecondMomentCheck {
  bool holds{false};
  Rational ratio;  // E[chi_1 chi_2] / E[chi_1]^2
};

[[nodiscard]] inline SecondMomentCheck check_second_moment_bound(std::uint64_t n, const ExactModel& model) {
  const ExactReport report = enumerate_exact(n, model);
  const Rational first_moment = report.expected_isolated / n;  // E[chi_1] by exchangeability
  detail::require(first_moment > 0, "verify_second_moment_bound: E[chi_1] is zero");
  SecondMomentCheck out;
  out.ratio = report.cross_moment / (first_moment * first_moment);

  const Rational q = exact_q(model.key());
  const Rational not_isolated_by_one = 1 - model.alpha() * (1 - q);
  const Rational denom = not_isolated_by_one * not_isolated_by_one;
  const Rational exponent = model.alpha() * model.alpha() * (1 - q) * n / denom;
  // exp is replaced by increasingly long partial sums, each a lower bound
  for (std::uint64_t terms = 8; terms <= 512; terms *= 2) {
    const Rational bound = (q + (1 - q) * exp_lower_bound(exponent, terms)) / denom;
    if (out.ratio <= bound) {
      out.holds = true;
      break;
    }
  }
  return out;
}

/// E[chi_1 chi_2] / E[chi_1]^2 <= (q + (1 - q) exp{alpha^2 (1 - q) n / (1 - alpha(1 - q))^2}) / (1 - alpha(1 - q))^2.
[[nodiscard]] inline bool verify_second_moment_bound(std::uint64_t n, const ExactModel& model) {
  return check_second_moment_bound(n, model).holds;
}

[[nodiscard]] inline std::string to_string(const Rational& r) { return r.str(); }

}  // namespace keygraph
