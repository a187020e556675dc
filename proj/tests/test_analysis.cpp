#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "keygraph/analysis.hpp"
#include "keygraph/rng.hpp"
#include "keygraph/samplers.hpp"
#include "support/bfs_oracle.hpp"

using namespace keygraph;

namespace {

Graph from_edges(std::size_t n, const std::vector<Edge>& edges) {
  GraphBuilder b{n};
  for (const auto& [i, j] : edges) b.add_edge(i, j);
  return std::move(b).build();
}

}  // namespace

TEST(Analyze, Examples) {
  const auto path = analyze(from_edges(4, {{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_TRUE(path.is_connected);
  EXPECT_EQ(path.isolated_count, 0U);
  EXPECT_EQ(path.component_sizes, (std::vector<std::size_t>{4}));
  EXPECT_EQ(path.min_degree, 1U);

  const auto split = analyze(from_edges(5, {{0, 1}, {2, 3}}));
  EXPECT_FALSE(split.is_connected);
  EXPECT_EQ(split.isolated_count, 1U);
  EXPECT_EQ(split.component_sizes, (std::vector<std::size_t>{2, 2, 1}));
  EXPECT_EQ(split.min_degree, 0U);

  const auto empty = analyze(from_edges(3, {}));
  EXPECT_FALSE(empty.is_connected);
  EXPECT_EQ(empty.isolated_count, 3U);
}

TEST(Analyze, DegenerateSizes) {
  const auto one = analyze(Graph::complete(1));
  EXPECT_TRUE(one.is_connected);
  EXPECT_EQ(one.isolated_count, 1U);
  const auto none = analyze(GraphBuilder{0}.build());
  EXPECT_FALSE(none.is_connected);
  EXPECT_EQ(none.isolated_count, 0U);
  EXPECT_TRUE(none.component_sizes.empty());
}

TEST(Analyze, Complete) {
  const auto s = analyze(Graph::complete(9));
  EXPECT_TRUE(s.is_connected);
  EXPECT_EQ(s.min_degree, 8U);
}

TEST(Analyze, AgreesWithBfsOnRandomGraphs) {
  RngStream rng{31, 0};
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    const double alpha = rng.uniform() * 4.0 / static_cast<double>(n);
    const Graph g = sample_er(n, std::min(alpha, 1.0), rng);
    const auto got = analyze(g);
    const auto want = reference::bfs_summary(n, g.edges());
    ASSERT_EQ(got.is_connected, want.connected) << "trial " << trial;
    ASSERT_EQ(got.isolated_count, want.isolated);
    ASSERT_EQ(got.component_sizes, want.sizes);
    ASSERT_EQ(got.min_degree, want.min_degree);
  }
}

TEST(Analyze, SparseRepresentationAgreesWithBfs) {
  RngStream rng{32, 0};
  const std::size_t n = kDenseVertexLimit + 100;
  const Graph g = sample_er(n, 1.2 * std::log(static_cast<double>(n)) / static_cast<double>(n), rng);
  ASSERT_FALSE(g.is_dense());
  const auto got = analyze(g);
  const auto want = reference::bfs_summary(n, g.edges());
  EXPECT_EQ(got.is_connected, want.connected);
  EXPECT_EQ(got.isolated_count, want.isolated);
  EXPECT_EQ(got.component_sizes, want.sizes);
}

TEST(Analyze, RelabelInvariant) {
  RngStream rng{33, 0};
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    const Graph g = sample_er(n, 0.08, rng);
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), Vertex{0});
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    EXPECT_EQ(analyze(g), analyze(relabel(g, perm)));
  }
}

TEST(Analyze, Invariants) {
  RngStream rng{34, 0};
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    const Graph g = sample_er(n, 0.05, rng);
    const auto s = analyze(g);
    EXPECT_EQ(std::accumulate(s.component_sizes.begin(), s.component_sizes.end(), std::size_t{0}), n);
    EXPECT_TRUE(std::is_sorted(s.component_sizes.rbegin(), s.component_sizes.rend()));
    // connected with n >= 2 rules out isolated nodes
    if (s.is_connected && n >= 2) EXPECT_EQ(s.isolated_count, 0U);
    EXPECT_EQ(s.isolated_count > 0, s.min_degree == 0);
    EXPECT_EQ(is_connected(g), s.is_connected);
    EXPECT_EQ(isolated_count(g), s.isolated_count);
  }
}
