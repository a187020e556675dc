// Calibration run for the zero-one trend check.
//
// For each target c the tool
//   1. estimates p_no_isolated at every schedule point with many trials,
//   2. computes, from those estimates, the probability that a 200-trial probe
//      violates the monotone trend by more than a given step slack (counts at
//      different n are independent binomials),
//   3. replays the 200-trial probe over many master seeds and counts failures.
//
// Usage: zeroone_pilot [--seeds S] [--reference-trials T]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <vector>

#include "CLI11.hpp"

#include "keygraph/experiment.hpp"

using namespace keygraph;

namespace {

constexpr std::uint64_t kProbeTrials = 200;
const std::vector<std::uint64_t> kNs{100, 200, 400, 800};
const std::vector<double> kSlacks{0.0, 0.01, 0.02, 0.03, 0.05};

std::vector<double> binomial_pmf(std::uint64_t n, double p) {
  std::vector<double> pmf(n + 1, 0.0);
  for (std::uint64_t k = 0; k <= n; ++k) {
    if (p <= 0.0) {
      pmf[k] = k == 0 ? 1.0 : 0.0;
    } else if (p >= 1.0) {
      pmf[k] = k == n ? 1.0 : 0.0;
    } else {
      const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      pmf[k] = std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
    }
  }
  return pmf;
}

/// P(some consecutive step moves against the trend by more than `slack`).
double violation_probability(const std::vector<double>& p, bool increasing, double slack) {
  const auto slack_counts = static_cast<long>(std::floor(slack * kProbeTrials + 1e-9));
  // dist[x] = P(no violation so far and current count == x)
  std::vector<double> dist = binomial_pmf(kProbeTrials, p[0]);
  for (std::size_t i = 1; i < p.size(); ++i) {
    const auto next_pmf = binomial_pmf(kProbeTrials, p[i]);
    std::vector<double> next(kProbeTrials + 1, 0.0);
    for (std::uint64_t x = 0; x <= kProbeTrials; ++x) {
      for (std::uint64_t y = 0; y <= kProbeTrials; ++y) {
        const long step = increasing ? static_cast<long>(y) - static_cast<long>(x)
                                     : static_cast<long>(x) - static_cast<long>(y);
        if (step >= -slack_counts) {
          next[y] += dist[x] * next_pmf[y];
        }
      }
    }
    dist = std::move(next);
  }
  double ok = 0.0;
  for (const double v : dist) {
    ok += v;
  }
  return std::max(0.0, 1.0 - ok);
}

double max_adverse_step(const std::vector<double>& p, bool increasing) {
  double worst = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    worst = std::max(worst, increasing ? p[i - 1] - p[i] : p[i] - p[i - 1]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-one trend calibration"};
  std::uint64_t seeds = 200;
  std::uint64_t reference_trials = 20000;
  app.add_option("--seeds", seeds, "Master seeds replayed with the 200-trial probe");
  app.add_option("--reference-trials", reference_trials, "Trials per point for the reference estimates");
  CLI11_PARSE(app, argc, argv);

  for (const double c : {2.0, 0.5}) {
    const bool increasing = c > 1.0;
    std::printf("## c = %g (expected %s)\n\n", c, increasing ? "nondecreasing" : "nonincreasing");

    ZeroOneProbeConfig reference;
    reference.c = c;
    reference.sigma = 20.0;
    reference.alpha_rule = AlphaRule::constant(0.8);
    reference.n_list = kNs;
    reference.trials = reference_trials;
    reference.master_seed = 0x5eed;
    std::vector<double> p;
    std::printf("| n | K | achieved c | p_no_isolated (%llu trials) |\n|---|---|---|---|\n",
                static_cast<unsigned long long>(reference_trials));
    for (const auto& row : zero_one_probe(reference)) {
      p.push_back(row.estimate.p_no_isolated);
      std::printf("| %llu | %llu | %.4f | %.5f |\n", static_cast<unsigned long long>(row.point.n),
                  static_cast<unsigned long long>(row.point.params.key().ring_size()), row.point.achieved_c,
                  row.estimate.p_no_isolated);
    }

    std::printf("\n| step slack | P(trend violated), binomial model |\n|---|---|\n");
    for (const double slack : kSlacks) {
      std::printf("| %.2f | %.2e |\n", slack, violation_probability(p, increasing, slack));
    }

    std::vector<double> worst_steps;
    std::vector<double> finals;
    for (std::uint64_t s = 1; s <= seeds; ++s) {
      ZeroOneProbeConfig probe = reference;
      probe.trials = kProbeTrials;
      probe.master_seed = s;
      std::vector<double> q;
      for (const auto& row : zero_one_probe(probe)) {
        q.push_back(row.estimate.p_no_isolated);
      }
      worst_steps.push_back(max_adverse_step(q, increasing));
      finals.push_back(q.back());
    }
    std::printf("\nReplay over master seeds 1..%llu with %llu trials per point:\n\n",
                static_cast<unsigned long long>(seeds), static_cast<unsigned long long>(kProbeTrials));
    std::printf("| step slack | seeds violating the trend |\n|---|---|\n");
    for (const double slack : kSlacks) {
      const auto bad = std::count_if(worst_steps.begin(), worst_steps.end(),
                                     [&](double w) { return w > slack + 1e-12; });
      std::printf("| %.2f | %ld |\n", slack, static_cast<long>(bad));
    }
    const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
    std::printf("\nFinal p_no_isolated across seeds: min %.3f, max %.3f; largest adverse step %.3f\n\n", *lo, *hi,
                *std::max_element(worst_steps.begin(), worst_steps.end()));
  }
  return 0;
}
