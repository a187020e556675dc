#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "keygraph/experiment.hpp"

using namespace keygraph;

TEST(RunTrial, Boundaries) {
  const auto off = run_trial(5, ModelParams::widened(KeyParams{2, 10}, 0.0), RngStream{1, 0});
  EXPECT_FALSE(off.connected);
  EXPECT_EQ(off.isolated_count, 5U);
  const auto full = run_trial(5, ModelParams::widened(KeyParams{4, 4}, 1.0), RngStream{1, 0});
  EXPECT_TRUE(full.connected);
  EXPECT_TRUE(full.no_isolated);
  EXPECT_EQ(full.min_degree, 4U);
}

TEST(RunTrial, Deterministic) {
  const ModelParams params{KeyParams{10, 1000}, 0.5};
  EXPECT_EQ(run_trial(300, params, RngStream{9, 3}), run_trial(300, params, RngStream{9, 3}));
  const DiskParams disk{KeyParams{10, 1000}, 0.2};
  EXPECT_EQ(run_trial(300, disk, RngStream{9, 3}), run_trial(300, disk, RngStream{9, 3}));
}

TEST(Wilson, Examples) {
  const auto [lo, hi] = wilson_interval(5, 10);
  EXPECT_NEAR(lo, 0.23659, 1e-4);
  EXPECT_NEAR(hi, 0.76341, 1e-4);
  EXPECT_EQ(wilson_interval(0, 10).first, 0.0);
  EXPECT_EQ(wilson_interval(10, 10).second, 1.0);
  for (std::uint64_t s = 0; s <= 7; ++s) {
    const auto [l, h] = wilson_interval(s, 7);
    const double p = static_cast<double>(s) / 7.0;
    EXPECT_LE(l, p);
    EXPECT_GE(h, p);
  }
  EXPECT_THROW((void)wilson_interval(0, 0), precondition_error);
}

TEST(RunPoint, SaturatedPoints) {
  const auto high = run_point(500, ModelParams{KeyParams{35, 10000}, 0.8}, 200, 1);
  EXPECT_EQ(high.p_connected, 1.0);
  const auto low = run_point(500, ModelParams{KeyParams{1, 10000}, 0.2}, 200, 1, 1);
  EXPECT_EQ(low.p_connected, 0.0);
  EXPECT_EQ(low.ci_low, 0.0);
}

TEST(RunPoint, SingleTrial) {
  const auto est = run_point(50, ModelParams{KeyParams{5, 100}, 0.5}, 1, 3);
  EXPECT_EQ(est.trials, 1U);
  EXPECT_TRUE(est.p_connected == 0.0 || est.p_connected == 1.0);
  EXPECT_EQ(est.var_isolated, 0.0);
  EXPECT_THROW((void)run_point(50, ModelParams{KeyParams{5, 100}, 0.5}, 0, 3), precondition_error);
}

TEST(RunPoint, ThreadCountInvariant) {
  const ModelParams params{KeyParams{12, 10000}, 0.8};
  const auto one = run_point(300, params, 97, 42, 7, 1);
  for (unsigned threads : {2U, 3U, 8U}) {
    const auto many = run_point(300, params, 97, 42, 7, threads);
    EXPECT_EQ(one.count_connected, many.count_connected);
    EXPECT_EQ(one.count_no_isolated, many.count_no_isolated);
    EXPECT_EQ(one.mean_isolated, many.mean_isolated);
  }
}

TEST(RunPoint, ContainmentAndInterval) {
  for (std::uint64_t k : {8U, 12U, 16U}) {
    const auto est = run_point(200, ModelParams{KeyParams{k, 10000}, 0.6}, 100, 5, k);
    // connected implies no isolated node
    EXPECT_LE(est.count_connected, est.count_no_isolated);
    EXPECT_LE(est.ci_low, est.p_connected);
    EXPECT_GE(est.ci_high, est.p_connected);
  }
}

TEST(RunPoint, MeanIsolatedMatchesClosedForm) {
  const ModelParams params{KeyParams{16, 10000}, 0.5};
  constexpr std::uint64_t kTrials = 10000;
  const auto est = run_point(200, params, kTrials, 11);
  const double expected = expected_isolated(200, params);
  EXPECT_NEAR(est.mean_isolated, expected, 4.0 * std::sqrt(est.var_isolated / kTrials));
}

TEST(RunPoint, EquivalenceAboveThreshold) {
  const auto est = run_point(500, ModelParams{KeyParams{14, 10000}, 0.8}, 300, 2);
  EXPECT_GE(est.equivalence_rate, 0.99);
}

TEST(Sweep, EmptyRangeAndValidation) {
  SweepConfig config;
  config.channel_values = {0.5};
  config.k_min = 5;
  config.k_max = 4;
  EXPECT_TRUE(run_sweep(config).rows.empty());
  config.k_max = 20000;
  EXPECT_THROW((void)run_sweep(config), precondition_error);
  config.k_max = 6;
  config.channel_values = {1.0};
  EXPECT_THROW((void)run_sweep(config), precondition_error);
  config.model = ModelKind::disk;
  config.channel_values = {0.5};
  EXPECT_THROW((void)run_sweep(config), precondition_error);
}

TEST(Sweep, CurveIsNearlyMonotone) {
  SweepConfig config;
  config.n = 300;
  config.channel_values = {0.4};
  config.k_min = 8;
  config.k_max = 30;
  config.trials = 200;
  const auto report = run_sweep(config);
  ASSERT_EQ(report.rows.size(), 23U);
  std::vector<double> curve;
  for (const auto& row : report.rows) {
    curve.push_back(row.estimate.p_connected);
    EXPECT_EQ(row.threshold_k, threshold_K(300, 10000, 0.4));
  }
  EXPECT_LE(isotonic_residual(curve), 0.15);
  const auto crossing = crossing_K(report.rows);
  ASSERT_TRUE(crossing.has_value());
  EXPECT_LE(std::llabs(static_cast<long long>(*crossing) - static_cast<long long>(threshold_K(300, 10000, 0.4))), 2);
}

TEST(Sweep, PointsUseDistinctStreams) {
  SweepConfig config;
  config.n = 100;
  config.channel_values = {0.3, 0.6};
  config.k_min = 10;
  config.k_max = 11;
  config.trials = 20;
  const auto a = run_sweep(config);
  config.threads = 4;
  const auto b = run_sweep(config);
  ASSERT_EQ(a.rows.size(), 4U);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].estimate.count_connected, b.rows[i].estimate.count_connected);
  }
  EXPECT_EQ(rows_for(a, 0.6).size(), 2U);
}

TEST(Isotonic, Examples) {
  EXPECT_EQ(isotonic_residual({0.0, 0.5, 1.0}), 0.0);
  EXPECT_NEAR(isotonic_residual({0.0, 0.6, 0.4, 1.0}), 0.2, 1e-12);
  EXPECT_NEAR(isotonic_residual({1.0, 0.0}), 1.0, 1e-12);
}

TEST(ZeroOne, SingleN) {
  ZeroOneProbeConfig config;
  config.c = 2.0;
  config.n_list = {200};
  config.trials = 20;
  const auto rows = zero_one_probe(config);
  ASSERT_EQ(rows.size(), 1U);
  EXPECT_EQ(rows[0].point.n, 200U);
  EXPECT_EQ(rows[0].estimate.trials, 20U);
  config.n_list = {200, 100};
  EXPECT_THROW((void)zero_one_probe(config), precondition_error);
}
