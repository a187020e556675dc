#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "keygraph/samplers.hpp"

using namespace keygraph;

namespace {

// |observed - p| <= z * sqrt(p (1 - p) / trials)
void expect_binomial(std::uint64_t successes, std::uint64_t trials, double p, double z = 3.0) {
  const double freq = static_cast<double>(successes) / static_cast<double>(trials);
  EXPECT_NEAR(freq, p, z * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)));
}

}  // namespace

TEST(SampleKeyRings, FullPool) {
  RngStream rng{1, 0};
  const auto rings = sample_key_rings(3, KeyParams{4, 4}, rng);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(std::vector<Key>(rings.ring(i).begin(), rings.ring(i).end()), (std::vector<Key>{0, 1, 2, 3}));
  }
}

TEST(SampleKeyRings, RingsAreValid) {
  RngStream rng{2, 0};
  const KeyParams key{35, 10000};
  const auto rings = sample_key_rings(500, key, rng);
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const auto r = rings.ring(i);
    ASSERT_EQ(r.size(), 35U);
    EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
    EXPECT_EQ(std::adjacent_find(r.begin(), r.end()), r.end());
    EXPECT_LT(r.back(), 10000U);
  }
}

TEST(SampleKeyRings, SingletonSymmetry) {
  RngStream rng{3, 0};
  const auto rings = sample_key_rings(1000, KeyParams{1, 2}, rng);
  std::uint64_t zeros = 0;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    zeros += rings.ring(i)[0] == 0 ? 1 : 0;
  }
  expect_binomial(zeros, 1000, 0.5);
}

TEST(SampleKeyRings, PairsUniform) {
  RngStream rng{4, 0};
  constexpr std::uint64_t kRings = 10000;
  const auto rings = sample_key_rings(kRings, KeyParams{2, 4}, rng);
  std::map<std::pair<Key, Key>, std::uint64_t> counts;
  for (std::size_t i = 0; i < kRings; ++i) {
    ++counts[{rings.ring(i)[0], rings.ring(i)[1]}];
  }
  ASSERT_EQ(counts.size(), 6U);
  for (const auto& [ring, c] : counts) {
    expect_binomial(c, kRings, 1.0 / 6.0);
  }
}

TEST(SampleKeyRings, ChiSquareUniformOverSubsets) {
  // 10 subsets of size 2 from a pool of 5; 9 degrees of freedom, 0.001 critical value 27.877
  RngStream rng{5, 0};
  constexpr std::uint64_t kRings = 100000;
  const auto rings = sample_key_rings(kRings, KeyParams{2, 5}, rng);
  std::map<std::pair<Key, Key>, std::uint64_t> counts;
  for (std::size_t i = 0; i < kRings; ++i) {
    ++counts[{rings.ring(i)[0], rings.ring(i)[1]}];
  }
  ASSERT_EQ(counts.size(), 10U);
  const double expected = kRings / 10.0;
  double chi2 = 0.0;
  for (const auto& [ring, c] : counts) {
    chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  }
  EXPECT_LT(chi2, 27.877);
}

TEST(KeyGraph, Examples) {
  const KeyParams key{2, 5};
  const auto same = KeyAssignment::from_rings(key, {{0, 1}, {0, 1}, {1, 0}});
  EXPECT_EQ(key_graph(same), Graph::complete(3));
  const auto disjoint = KeyAssignment::from_rings(KeyParams{1, 5}, {{0}, {1}, {2}, {3}});
  EXPECT_EQ(key_graph(disjoint).edge_count(), 0U);
  const auto mixed = KeyAssignment::from_rings(key, {{0, 1}, {1, 2}, {3, 4}});
  EXPECT_EQ(key_graph(mixed).edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_THROW((void)KeyAssignment::from_rings(key, {{0, 0}}), precondition_error);
  EXPECT_THROW((void)KeyAssignment::from_rings(key, {{0, 5}}), precondition_error);
  EXPECT_THROW((void)KeyAssignment::from_rings(key, {{0}}), precondition_error);
}

TEST(KeyGraph, MatchesPairwiseIntersection) {
  // small pools go through the counting sort, large ones through the comparison sort
  for (const KeyParams key : {KeyParams{3, 40}, KeyParams{3, 1000000}, KeyParams{20, 2000}}) {
    RngStream rng{6, key.pool_size()};
    const auto rings = sample_key_rings(120, key, rng);
    const Graph g = key_graph(rings);
    for (std::size_t i = 0; i < rings.size(); ++i) {
      for (std::size_t j = i + 1; j < rings.size(); ++j) {
        std::vector<Key> common;
        std::set_intersection(rings.ring(i).begin(), rings.ring(i).end(), rings.ring(j).begin(), rings.ring(j).end(),
                              std::back_inserter(common));
        EXPECT_EQ(g.has_edge(static_cast<Vertex>(i), static_cast<Vertex>(j)), !common.empty());
      }
    }
  }
}

TEST(SampleEr, Boundaries) {
  RngStream rng{7, 0};
  EXPECT_EQ(sample_er(30, 0.0, rng).edge_count(), 0U);
  EXPECT_EQ(sample_er(30, 1.0, rng), Graph::complete(30));
  EXPECT_THROW((void)sample_er(30, 1.5, rng), precondition_error);
}

TEST(SampleEr, TwoNodeFrequency) {
  std::uint64_t present = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    RngStream rng{8, s};
    present += sample_er(2, 0.25, rng).edge_count();
  }
  expect_binomial(present, 10000, 0.25);
}

TEST(SampleEr, EdgeCountBothPaths) {
  // geometric skipping below 0.25, per-slot draws above; each slot must stay Bernoulli(alpha)
  for (double alpha : {0.01, 0.1, 0.3, 0.8}) {
    constexpr std::size_t kN = 200;
    constexpr std::uint64_t kSamples = 200;
    std::vector<std::uint64_t> per_slot_row0(kN, 0);
    std::uint64_t total = 0;
    for (std::uint64_t s = 0; s < kSamples; ++s) {
      RngStream rng{9, s};
      const Graph g = sample_er(kN, alpha, rng);
      total += g.edge_count();
      for (Vertex j = 1; j < kN; ++j) {
        per_slot_row0[j] += g.has_edge(0, j) ? 1 : 0;
      }
    }
    const std::uint64_t slots = kSamples * kN * (kN - 1) / 2;
    expect_binomial(total, slots, alpha, 4.0);
    const std::uint64_t row0 = std::accumulate(per_slot_row0.begin(), per_slot_row0.end(), std::uint64_t{0});
    expect_binomial(row0, kSamples * (kN - 1), alpha, 4.0);
  }
}

TEST(SampleEr, LastSlotReachable) {
  // the final slot (n-2, n-1) must be drawn by the skipping walk
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    RngStream rng{10, s};
    hits += sample_er(5, 0.1, rng).has_edge(3, 4) ? 1 : 0;
  }
  expect_binomial(hits, 20000, 0.1, 4.0);
}

TEST(Rgg, WraparoundExamples) {
  const Positions near_wrap{{0.0, 0.0}, {0.9, 0.0}};
  EXPECT_NEAR(torus_distance(near_wrap[0], near_wrap[1]), 0.1, 1e-12);
  EXPECT_TRUE(rgg_from_positions(near_wrap, 0.2).has_edge(0, 1));
  const Positions far{{0.0, 0.0}, {0.5, 0.5}};
  EXPECT_FALSE(rgg_from_positions(far, 0.4).has_edge(0, 1));
  RngStream rng{11, 0};
  EXPECT_THROW((void)sample_rgg_torus(10, 0.5, rng), precondition_error);
}

TEST(Rgg, StrictInequality) {
  const Positions pts{{0.0, 0.0}, {0.25, 0.0}};
  EXPECT_FALSE(rgg_from_positions(pts, 0.25).has_edge(0, 1));
  EXPECT_TRUE(rgg_from_positions(pts, 0.2500001).has_edge(0, 1));
}

TEST(Rgg, CellGridMatchesBruteForce) {
  for (double rho : {0.05, 0.1, 0.26, 0.3, 0.45}) {
    RngStream rng{12, static_cast<std::uint64_t>(rho * 100)};
    const auto [pos, g] = sample_rgg_torus(300, rho, rng);
    GraphBuilder brute{pos.size()};
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = i + 1; j < pos.size(); ++j) {
        if (torus_distance(pos[i], pos[j]) < rho) {
          brute.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j));
        }
      }
    }
    EXPECT_EQ(g, std::move(brute).build()) << "rho=" << rho;
  }
}

TEST(Rgg, TwoNodeEdgeFrequencyIsDiskArea) {
  constexpr std::uint64_t kSamples = 100000;
  std::uint64_t present = 0;
  for (std::uint64_t s = 0; s < kSamples; ++s) {
    RngStream rng{13, s};
    present += sample_rgg_torus(2, 0.3, rng).second.edge_count();
  }
  expect_binomial(present, kSamples, std::numbers::pi * 0.09);
}

TEST(Rgg, RelabelingCommutes) {
  RngStream rng{14, 0};
  const auto [pos, g] = sample_rgg_torus(200, 0.12, rng);
  std::vector<Vertex> perm(pos.size());
  std::iota(perm.begin(), perm.end(), Vertex{0});
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 37, perm.end());
  Positions moved(pos.size());
  for (std::size_t v = 0; v < pos.size(); ++v) {
    moved[perm[v]] = pos[v];
  }
  EXPECT_EQ(rgg_from_positions(moved, 0.12), relabel(g, perm));
}

TEST(Intersection, Boundaries) {
  RngStream rng{15, 0};
  EXPECT_EQ(sample_kg_intersection(20, ModelParams::widened(KeyParams{3, 50}, 0.0), rng).edge_count(), 0U);
  EXPECT_EQ(sample_kg_intersection(20, ModelParams::widened(KeyParams{5, 5}, 1.0), rng), Graph::complete(20));
}

TEST(Intersection, IsIntersectionOfConstituents) {
  // replaying the stream reproduces the constituents the sampler drew
  const ModelParams params{KeyParams{4, 60}, 0.4};
  for (std::uint64_t s = 0; s < 50; ++s) {
    RngStream rng{16, s};
    const Graph g = sample_kg_intersection(80, params, rng);
    RngStream replay{16, s};
    const Graph keys = key_graph(sample_key_rings(80, params.key(), replay));
    const Graph channel = sample_er(80, params.alpha(), replay);
    for (Vertex i = 0; i < 80; ++i) {
      for (Vertex j = i + 1; j < 80; ++j) {
        ASSERT_EQ(g.has_edge(i, j), keys.has_edge(i, j) && channel.has_edge(i, j));
      }
    }
  }
  const DiskParams disk{KeyParams{4, 60}, 0.2};
  RngStream rng{17, 0};
  const Graph h = sample_kh_intersection(80, disk, rng);
  RngStream replay{17, 0};
  const Graph keys = key_graph(sample_key_rings(80, disk.key(), replay));
  const Graph channel = sample_rgg_torus(80, disk.rho(), replay).second;
  EXPECT_EQ(h, intersect(keys, channel));
}

TEST(Intersection, TwoNodeEdgeFrequency) {
  const ModelParams params{KeyParams{1, 2}, 0.5};
  constexpr std::uint64_t kSamples = 100000;
  std::uint64_t present = 0;
  for (std::uint64_t s = 0; s < kSamples; ++s) {
    RngStream rng{18, s};
    present += sample_kg_intersection(2, params, rng).edge_count();
  }
  expect_binomial(present, kSamples, 0.25);
}

TEST(Intersection, EdgeMarginalMatchesModel) {
  const ModelParams params{KeyParams{2, 10}, 0.5};
  const double p = edge_probability(params).value();
  constexpr std::uint64_t kSamples = 10000;
  std::uint64_t present = 0;
  for (std::uint64_t s = 0; s < kSamples; ++s) {
    RngStream rng{19, s};
    present += sample_kg_intersection(2, params, rng).edge_count();
  }
  expect_binomial(present, kSamples, p);
}

TEST(Intersection, Deterministic) {
  const ModelParams params{KeyParams{13, 10000}, 0.8};
  RngStream a{20, 5};
  RngStream b{20, 5};
  EXPECT_EQ(sample_kg_intersection(500, params, a), sample_kg_intersection(500, params, b));
  const DiskParams disk{KeyParams{13, 10000}, 0.25};
  RngStream c{21, 5};
  RngStream d{21, 5};
  EXPECT_EQ(sample_kh_intersection(500, disk, c), sample_kh_intersection(500, disk, d));
}
