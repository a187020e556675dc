#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include "keygraph/graph.hpp"

namespace keygraph {

/// Disjoint-set forest with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_{n} {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) {
      return false;
    }
    if (size_[a] < size_[b]) {
      std::swap(a, b);
    }
    parent_[b] = a;
    size_[a] += size_[b];
    --components_;
    return true;
  }

  [[nodiscard]] std::size_t component_size(std::size_t x) noexcept { return size_[find(x)]; }
  [[nodiscard]] std::size_t components() const noexcept { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t components_;
};

struct StructureSummary {
  bool is_connected{false};
  std::size_t isolated_count{0};
  std::vector<std::size_t> component_sizes;  // descending
  std::size_t min_degree{0};

  friend bool operator==(const StructureSummary&, const StructureSummary&) = default;
};

/// Connectivity, isolated nodes, component sizes and minimum degree in one pass over
/// the edges. A single vertex counts as connected and isolated; the empty graph
/// (n = 0) is reported as not connected.
[[nodiscard]] inline StructureSummary analyze(const Graph& g) {
  const std::size_t n = g.size();
  UnionFind sets{n};
  std::vector<std::size_t> degree(n, 0);
  g.for_each_edge([&](Vertex i, Vertex j) {
    ++degree[i];
    ++degree[j];
    sets.unite(i, j);
  });

  StructureSummary out;
  out.is_connected = n >= 1 && sets.components() == 1;
  out.isolated_count = static_cast<std::size_t>(std::count(degree.begin(), degree.end(), std::size_t{0}));
  out.min_degree = n == 0 ? 0 : *std::min_element(degree.begin(), degree.end());
  out.component_sizes.reserve(sets.components());
  for (std::size_t v = 0; v < n; ++v) {
    if (sets.find(v) == v) {
      out.component_sizes.push_back(sets.component_size(v));
    }
  }
  std::sort(out.component_sizes.begin(), out.component_sizes.end(), std::greater<>{});
  return out;
}

[[nodiscard]] inline bool is_connected(const Graph& g) { return analyze(g).is_connected; }

[[nodiscard]] inline std::size_t isolated_count(const Graph& g) { return analyze(g).isolated_count; }

}  // namespace keygraph
