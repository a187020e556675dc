#pragma once

// Fixed verification grids over the exact oracle. Every grid instance must pass;
// counterexamples are printed with their parameters.

#include <cstdint>
#include <ostream>
#include <vector>

#include "keygraph/exact_oracle.hpp"

namespace keygraph {

struct SuiteResult {
  std::uint64_t instances{0};
  std::uint64_t counterexamples{0};

  SuiteResult& operator+=(const SuiteResult& other) {
    instances += other.instances;
    counterexamples += other.counterexamples;
    return *this;
  }
  [[nodiscard]] bool ok() const noexcept { return counterexamples == 0; }
};

/// Deliberately broken bound used to prove the harness reports failures.
enum class Mutation { none, halve_tree_bound };

namespace detail {

inline std::vector<Rational> rationals(std::initializer_list<std::pair<int, int>> fractions) {
  std::vector<Rational> out;
  for (const auto& [num, den] : fractions) {
    out.emplace_back(num, den);
  }
  return out;
}

inline void report_line(std::ostream& os, const char* family, const SuiteResult& r) {
  os << family << ": " << r.instances << " instances, " << r.counterexamples << " counterexamples\n";
}

}  // namespace detail

/// Ratio bound on K in [1,10], P in [K,60], a in {1, 3/2, 2, 5/2}.
inline SuiteResult verify_ratio_grid(std::ostream& os) {
  SuiteResult r;
  const auto exponents = detail::rationals({{1, 1}, {3, 2}, {2, 1}, {5, 2}});
  for (std::uint64_t k = 1; k <= 10; ++k) {
    for (std::uint64_t p = k; p <= 60; ++p) {
      for (const Rational& a : exponents) {
        ++r.instances;
        if (!verify_ratio_bound(KeyParams{k, p}, a)) {
          ++r.counterexamples;
          os << "COUNTEREXAMPLE ratio_bound K=" << k << " P=" << p << " a=" << a << '\n';
        }
      }
    }
  }
  detail::report_line(os, "ratio_bound", r);
  return r;
}

/// Lambda bound on K in [1,10], P in [K,60], lambda in {1/10, ..., 9/10}.
inline SuiteResult verify_lambda_grid(std::ostream& os) {
  SuiteResult r;
  for (std::uint64_t k = 1; k <= 10; ++k) {
    for (std::uint64_t p = k; p <= 60; ++p) {
      for (int tenth = 1; tenth <= 9; ++tenth) {
        ++r.instances;
        const Rational lambda{tenth, 10};
        if (!verify_lambda_bound(KeyParams{k, p}, lambda)) {
          ++r.counterexamples;
          os << "COUNTEREXAMPLE lambda_bound K=" << k << " P=" << p << " lambda=" << lambda << '\n';
        }
      }
    }
  }
  detail::report_line(os, "lambda_bound", r);
  return r;
}

/// Spanning-tree bound on r in {2,3,4}, K in {1,2}, P in [K,4], alpha in {1/4,1/3,1/2,3/4}.
inline SuiteResult verify_tree_grid(std::ostream& os, Mutation mutation = Mutation::none) {
  SuiteResult r;
  const Rational scale = mutation == Mutation::halve_tree_bound ? Rational{1, 2} : Rational{1};
  const auto alphas = detail::rationals({{1, 4}, {1, 3}, {1, 2}, {3, 4}});
  for (std::uint64_t nodes = 2; nodes <= 4; ++nodes) {
    for (std::uint64_t k = 1; k <= 2; ++k) {
      for (std::uint64_t p = k; p <= 4; ++p) {
        for (const Rational& alpha : alphas) {
          ++r.instances;
          if (!verify_tree_bound(nodes, ExactModel{KeyParams{k, p}, alpha}, scale)) {
            ++r.counterexamples;
            os << "COUNTEREXAMPLE tree_bound r=" << nodes << " K=" << k << " P=" << p << " alpha=" << alpha << '\n';
          }
        }
      }
    }
  }
  detail::report_line(os, "tree_bound", r);
  return r;
}

/// Second-moment bound on n in {2,3}, K in {1,2}, P in [K,4], alpha in {1/4,1/2,3/4}.
inline SuiteResult verify_second_moment_grid(std::ostream& os) {
  SuiteResult r;
  const auto alphas = detail::rationals({{1, 4}, {1, 2}, {3, 4}});
  for (std::uint64_t n = 2; n <= 3; ++n) {
    for (std::uint64_t k = 1; k <= 2; ++k) {
      for (std::uint64_t p = k; p <= 4; ++p) {
        for (const Rational& alpha : alphas) {
          ++r.instances;
          if (!verify_second_moment_bound(n, ExactModel{KeyParams{k, p}, alpha})) {
            ++r.counterexamples;
            os << "COUNTEREXAMPLE second_moment_bound n=" << n << " K=" << k << " P=" << p << " alpha=" << alpha
               << '\n';
          }
        }
      }
    }
  }
  detail::report_line(os, "second_moment_bound", r);
  return r;
}

inline SuiteResult run_bound_suite(std::ostream& os, Mutation mutation = Mutation::none) {
  SuiteResult total;
  total += verify_ratio_grid(os);
  total += verify_lambda_grid(os);
  total += verify_tree_grid(os, mutation);
  total += verify_second_moment_grid(os);
  return total;
}

/// Enumerates n in {2,3}, K in {1,2}, P in {2,3,4}, alpha in {1/4,1/2,3/4}, printing the
/// exact probabilities. An instance fails when the total mass differs from 1 or the
/// enumerated expected isolated count differs from the closed form.
inline SuiteResult run_oracle_suite(std::ostream& os) {
  SuiteResult r;
  const auto alphas = detail::rationals({{1, 4}, {1, 2}, {3, 4}});
  for (std::uint64_t n = 2; n <= 3; ++n) {
    for (std::uint64_t k = 1; k <= 2; ++k) {
      for (std::uint64_t p = 2; p <= 4; ++p) {
        for (const Rational& alpha : alphas) {
          ++r.instances;
          const ExactModel model{KeyParams{k, p}, alpha};
          const ExactReport report = enumerate_exact(n, model);
          const Rational closed_form = exact_expected_isolated(n, model);
          const bool ok = report.total_mass == 1 && report.expected_isolated == closed_form;
          os << (ok ? "ok" : "MISMATCH") << " n=" << n << " K=" << k << " P=" << p << " alpha=" << alpha
             << " p_connected=" << report.p_connected << " p_no_isolated=" << report.p_no_isolated
             << " expected_isolated=" << report.expected_isolated << " closed_form=" << closed_form
             << " cross_moment=" << report.cross_moment << '\n';
          r.counterexamples += ok ? 0 : 1;
        }
      }
    }
  }
  detail::report_line(os, "oracle", r);
  return r;
}

}  // namespace keygraph
