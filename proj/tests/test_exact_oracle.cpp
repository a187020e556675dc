#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "keygraph/exact_oracle.hpp"
#include "keygraph/experiment.hpp"
#include "keygraph/verify_suite.hpp"

using namespace keygraph;

namespace {

Rational r(int num, int den) { return Rational{num, den}; }

// Values below were produced by a separate brute-force enumerator over ring tuples
// and channel states written in Python with exact fractions.
struct Frozen {
  std::uint64_t n, k, p;
  Rational alpha, p_connected, p_no_isolated, expected_isolated, cross_moment;
};

const Frozen kFrozen[] = {
    {2, 1, 2, r(1, 2), r(1, 4), r(1, 4), r(3, 2), r(3, 4)},
    {2, 1, 1, r(1, 2), r(1, 2), r(1, 2), r(1, 1), r(1, 2)},
    {3, 1, 2, r(1, 2), r(1, 8), r(1, 8), r(27, 16), r(13, 32)},
    {3, 2, 4, r(1, 3), r(61, 324), r(61, 324), r(169, 108), r(61, 162)},
    {4, 1, 2, r(3, 4), r(1917, 16384), r(10773, 32768), r(125, 128), r(545, 8192)},
};

}  // namespace

TEST(ExactQ, Examples) {
  EXPECT_EQ(exact_q(KeyParams{1, 2}), r(1, 2));
  EXPECT_EQ(exact_q(KeyParams{2, 4}), r(1, 6));
  EXPECT_EQ(exact_q(KeyParams{3, 5}), 0);
  EXPECT_EQ(binomial(10, 3), 120);
  EXPECT_EQ(binomial(3, 5), 0);
}

TEST(ExactQ, AgreesWithFloatingPoint) {
  for (std::uint64_t p = 1; p <= 80; ++p) {
    for (std::uint64_t k = 1; k <= p; ++k) {
      const double exact = exact_q(KeyParams{k, p}).convert_to<double>();
      EXPECT_NEAR(q_theta(KeyParams{k, p}).value(), exact, 1e-13 + 1e-12 * exact) << k << ' ' << p;
    }
  }
}

TEST(EnumerateExact, FrozenValues) {
  for (const Frozen& f : kFrozen) {
    const ExactModel model{KeyParams{f.k, f.p}, f.alpha};
    const ExactReport rep = enumerate_exact(f.n, model);
    SCOPED_TRACE(testing::Message() << "n=" << f.n << " K=" << f.k << " P=" << f.p);
    EXPECT_EQ(rep.p_connected, f.p_connected);
    EXPECT_EQ(rep.p_no_isolated, f.p_no_isolated);
    EXPECT_EQ(rep.expected_isolated, f.expected_isolated);
    EXPECT_EQ(rep.cross_moment, f.cross_moment);
    EXPECT_EQ(rep.total_mass, 1);
  }
}

TEST(EnumerateExact, ClosedFormExpectedIsolated) {
  for (std::uint64_t n = 2; n <= 4; ++n) {
    for (std::uint64_t k = 1; k <= 2; ++k) {
      for (std::uint64_t p = k; p <= 4; ++p) {
        for (const Rational& alpha : {r(0, 1), r(1, 4), r(1, 2), r(1, 1)}) {
          const ExactModel model{KeyParams{k, p}, alpha};
          const ExactReport rep = enumerate_exact(n, model);
          EXPECT_EQ(rep.total_mass, 1);
          EXPECT_EQ(rep.expected_isolated, exact_expected_isolated(n, model));
          EXPECT_LE(rep.p_connected, rep.p_no_isolated);
        }
      }
    }
  }
}

TEST(EnumerateExact, Boundaries) {
  const ExactReport full = enumerate_exact(3, ExactModel{KeyParams{2, 2}, r(1, 1)});
  EXPECT_EQ(full.p_connected, 1);
  const ExactReport off = enumerate_exact(3, ExactModel{KeyParams{2, 3}, r(0, 1)});
  EXPECT_EQ(off.p_connected, 0);
  EXPECT_EQ(off.expected_isolated, 3);
}

TEST(EnumerateExact, Preconditions) {
  EXPECT_THROW((void)enumerate_exact(1, ExactModel{KeyParams{1, 2}, r(1, 2)}), precondition_error);
  EXPECT_THROW((void)ExactModel(KeyParams{1, 2}, r(3, 2)), precondition_error);
  EXPECT_THROW((void)enumerate_exact(12, ExactModel{KeyParams{5, 20}, r(1, 2)}), budget_exceeded_error);
}

TEST(EnumerateExact, MonteCarloAgreement) {
  // 4 sigma on 1e5 trials per quantity
  constexpr std::uint64_t kTrials = 100000;
  const struct {
    std::uint64_t n, k, p;
    Rational alpha;
  } cases[] = {{3, 2, 4, r(1, 3)}, {4, 1, 2, r(3, 4)}, {3, 1, 3, r(1, 2)}};
  std::uint64_t point = 0;
  for (const auto& c : cases) {
    const ExactReport exact = enumerate_exact(c.n, ExactModel{KeyParams{c.k, c.p}, c.alpha});
    const ModelParams params{KeyParams{c.k, c.p}, c.alpha.convert_to<double>()};
    const PointEstimate est = run_point(c.n, params, kTrials, 77, point++);
    for (const auto& [observed, truth] : {std::pair{est.p_connected, exact.p_connected.convert_to<double>()},
                                          std::pair{est.p_no_isolated, exact.p_no_isolated.convert_to<double>()}}) {
      EXPECT_NEAR(observed, truth, 4.0 * std::sqrt(truth * (1.0 - truth) / kTrials));
    }
    const double mean = exact.expected_isolated.convert_to<double>();
    EXPECT_NEAR(est.mean_isolated, mean, 4.0 * std::sqrt(est.var_isolated / kTrials));
  }
}

TEST(Bounds, RatioExamples) {
  EXPECT_TRUE(verify_ratio_bound(KeyParams{2, 10}, r(3, 2)));
  EXPECT_TRUE(verify_ratio_bound(KeyParams{1, 1}, r(1, 1)));
  EXPECT_TRUE(verify_ratio_bound(KeyParams{5, 12}, r(5, 2)));
  EXPECT_THROW((void)verify_ratio_bound(KeyParams{2, 10}, r(1, 2)), precondition_error);
}

TEST(Bounds, LambdaExamples) {
  EXPECT_TRUE(verify_lambda_bound(KeyParams{2, 10}, r(1, 2)));
  EXPECT_TRUE(verify_lambda_bound(KeyParams{3, 5}, r(9, 10)));
  EXPECT_THROW((void)verify_lambda_bound(KeyParams{2, 10}, r(1, 1)), precondition_error);
}

TEST(Bounds, TreeExamples) {
  const ExactModel model{KeyParams{1, 2}, r(1, 2)};
  EXPECT_EQ(tree_bound(2, model), r(1, 4));
  EXPECT_EQ(tree_bound(3, model), r(3, 16));
  EXPECT_TRUE(verify_tree_bound(3, model));
  // halving the bound must be caught: at r = 2 the bound is attained
  EXPECT_FALSE(verify_tree_bound(2, model, r(1, 2)));
}

TEST(Bounds, ExpLowerBound) {
  EXPECT_EQ(exp_lower_bound(r(0, 1), 8), 1);
  const double e = exp_lower_bound(r(1, 1), 20).convert_to<double>();
  EXPECT_LE(e, std::exp(1.0));
  EXPECT_NEAR(e, std::exp(1.0), 1e-15);
}

TEST(Bounds, SecondMomentExamples) {
  const auto check = check_second_moment_bound(3, ExactModel{KeyParams{1, 2}, r(1, 2)});
  EXPECT_TRUE(check.holds);
  // E[chi_1] = 9/16, cross moment 13/32
  EXPECT_EQ(check.ratio, r(13, 32) / (r(9, 16) * r(9, 16)));
}

TEST(Suites, GridsHaveNoCounterexamples) {
  std::ostringstream log;
  const SuiteResult bounds = run_bound_suite(log);
  EXPECT_TRUE(bounds.ok()) << log.str();
  EXPECT_EQ(bounds.instances, 2220U + 4995U + 84U + 42U);
  const SuiteResult oracle = run_oracle_suite(log);
  EXPECT_TRUE(oracle.ok()) << log.str();
  EXPECT_EQ(oracle.instances, 36U);
}

TEST(Suites, MutantIsDetected) {
  std::ostringstream log;
  const SuiteResult mutant = verify_tree_grid(log, Mutation::halve_tree_bound);
  EXPECT_GT(mutant.counterexamples, 0U);
  EXPECT_NE(log.str().find("COUNTEREXAMPLE tree_bound r=2"), std::string::npos);
}
