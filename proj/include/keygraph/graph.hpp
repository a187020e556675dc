#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "keygraph/errors.hpp"

namespace keygraph {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Vertex counts up to this use a dense bitset adjacency matrix; larger graphs
/// use sorted adjacency lists.
inline constexpr std::size_t kDenseVertexLimit = std::size_t{1} << 13;

class GraphBuilder;

/// Simple undirected graph on vertices 0..n-1. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Empty graph on n vertices.
  explicit Graph(std::size_t n) : n_{n}, dense_{n <= kDenseVertexLimit} {
    if (dense_) {
      words_ = (n + 63) / 64;
      rows_.assign(n * words_, 0);
    } else {
      adjacency_.resize(n);
    }
  }

  [[nodiscard]] static Graph complete(std::size_t n);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edge_count_; }
  [[nodiscard]] bool is_dense() const noexcept { return dense_; }

  [[nodiscard]] bool has_edge(Vertex i, Vertex j) const noexcept {
    if (i >= n_ || j >= n_ || i == j) {
      return false;
    }
    if (dense_) {
      return (rows_[i * words_ + j / 64] >> (j % 64)) & 1U;
    }
    const auto& list = adjacency_[i];
    return std::binary_search(list.begin(), list.end(), j);
  }

  [[nodiscard]] std::size_t degree(Vertex v) const noexcept {
    if (dense_) {
      std::size_t d = 0;
      for (std::size_t w = 0; w < words_; ++w) {
        d += static_cast<std::size_t>(std::popcount(rows_[v * words_ + w]));
      }
      return d;
    }
    return adjacency_[v].size();
  }

  /// Calls f(i, j) once per edge with i < j, in lexicographic order.
  template <class F>
  void for_each_edge(F&& f) const {
    if (dense_) {
      for (std::size_t i = 0; i < n_; ++i) {
        const std::uint64_t* row = &rows_[i * words_];
        std::size_t w = (i + 1) / 64;
        if (w >= words_) {
          continue;
        }
        // drop bits j <= i in the first word
        std::uint64_t bits = row[w] & (~std::uint64_t{0} << ((i + 1) % 64));
        for (;;) {
          while (bits != 0) {
            const auto j = static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
            f(static_cast<Vertex>(i), j);
            bits &= bits - 1;
          }
          if (++w == words_) {
            break;
          }
          bits = row[w];
        }
      }
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& list = adjacency_[i];
      for (auto it = std::upper_bound(list.begin(), list.end(), static_cast<Vertex>(i)); it != list.end(); ++it) {
        f(static_cast<Vertex>(i), *it);
      }
    }
  }

  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for_each_edge([&](Vertex i, Vertex j) { out.emplace_back(i, j); });
    return out;
  }

  [[nodiscard]] std::vector<Vertex> neighbors(Vertex v) const {
    if (!dense_) {
      return adjacency_[v];
    }
    std::vector<Vertex> out;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t bits = rows_[v * words_ + w];
      while (bits != 0) {
        out.push_back(static_cast<Vertex>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    if (a.n_ != b.n_ || a.edge_count_ != b.edge_count_) {
      return false;
    }
    if (a.dense_ && b.dense_) {
      return a.rows_ == b.rows_;
    }
    return a.edges() == b.edges();
  }

  friend Graph intersect(const Graph& a, const Graph& b);
  friend class GraphBuilder;

 private:
  std::size_t n_{0};
  bool dense_{true};
  std::size_t words_{0};
  std::size_t edge_count_{0};
  std::vector<std::uint64_t> rows_;            // dense: n rows of `words_` words
  std::vector<std::vector<Vertex>> adjacency_;  // sparse: sorted neighbor lists
};

/// Accumulates edges with set semantics; duplicates are ignored.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n) : graph_{n} {}

  [[nodiscard]] std::size_t size() const noexcept { return graph_.n_; }
  [[nodiscard]] bool is_dense() const noexcept { return graph_.dense_; }

  void add_edge(Vertex i, Vertex j) {
    detail::require(i != j, "GraphBuilder: self-loops are not allowed");
    detail::require(i < graph_.n_ && j < graph_.n_, "GraphBuilder: vertex index out of range");
    add_edge_unchecked(i, j);
  }

  /// Caller guarantees i != j and both indices are in range.
  void add_edge_unchecked(Vertex i, Vertex j) noexcept {
    if (graph_.dense_) {
      std::uint64_t& word = graph_.rows_[i * graph_.words_ + j / 64];
      const std::uint64_t bit = std::uint64_t{1} << (j % 64);
      if ((word & bit) == 0) {
        word |= bit;
        graph_.rows_[j * graph_.words_ + i / 64] |= std::uint64_t{1} << (i % 64);
        ++graph_.edge_count_;
      }
      return;
    }
    graph_.adjacency_[i].push_back(j);
    graph_.adjacency_[j].push_back(i);
  }

  /// Dense graphs only: ORs `bits` into word `word` of row i. Every set bit must
  /// stand for a column j > i; build() mirrors these into the lower triangle.
  void add_upper_word(Vertex i, std::size_t word, std::uint64_t bits) noexcept {
    graph_.rows_[i * graph_.words_ + word] |= bits;
    mirror_pending_ = true;
  }

  [[nodiscard]] Graph build() && {
    if (graph_.dense_ && mirror_pending_) {
      const std::size_t n = graph_.n_;
      const std::size_t words = graph_.words_;
      std::size_t twice_edges = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t w = (i + 1) / 64; w < words; ++w) {
          std::uint64_t bits = graph_.rows_[i * words + w];
          if (w == (i + 1) / 64) {
            bits &= ~std::uint64_t{0} << ((i + 1) % 64);
          }
          while (bits != 0) {
            const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
            graph_.rows_[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
            bits &= bits - 1;
          }
        }
      }
      for (const std::uint64_t word : graph_.rows_) {
        twice_edges += static_cast<std::size_t>(std::popcount(word));
      }
      graph_.edge_count_ = twice_edges / 2;
    }
    if (!graph_.dense_) {
      std::size_t total = 0;
      for (auto& list : graph_.adjacency_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        total += list.size();
      }
      graph_.edge_count_ = total / 2;
    }
    return std::move(graph_);
  }

 private:
  Graph graph_;
  bool mirror_pending_{false};
};

inline Graph Graph::complete(std::size_t n) {
  GraphBuilder builder{n};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      builder.add_edge_unchecked(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  return std::move(builder).build();
}

/// Graph whose edge set is the intersection of the two edge sets.
[[nodiscard]] inline Graph intersect(const Graph& a, const Graph& b) {
  detail::require(a.size() == b.size(), "intersect: graphs have different vertex counts");
  Graph out{a.size()};
  if (a.dense_) {
    std::size_t twice_edges = 0;
    for (std::size_t k = 0; k < out.rows_.size(); ++k) {
      out.rows_[k] = a.rows_[k] & b.rows_[k];
      twice_edges += static_cast<std::size_t>(std::popcount(out.rows_[k]));
    }
    out.edge_count_ = twice_edges / 2;
    return out;
  }
  std::size_t total = 0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    const auto& la = a.adjacency_[v];
    const auto& lb = b.adjacency_[v];
    std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(out.adjacency_[v]));
    total += out.adjacency_[v].size();
  }
  out.edge_count_ = total / 2;
  return out;
}

/// Graph with vertex v renamed to perm[v].
[[nodiscard]] inline Graph relabel(const Graph& g, const std::vector<Vertex>& perm) {
  detail::require(perm.size() == g.size(), "relabel: permutation size mismatch");
  GraphBuilder builder{g.size()};
  g.for_each_edge([&](Vertex i, Vertex j) { builder.add_edge(perm[i], perm[j]); });
  return std::move(builder).build();
}

// Edge-list text format:
//   n=<count>
//   i j
//   ...
// one edge per line with i < j, sorted.

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << "n=" << g.size() << '\n';
  g.for_each_edge([&](Vertex i, Vertex j) { os << i << ' ' << j << '\n'; });
}

[[nodiscard]] inline Graph read_edge_list(std::istream& is) {
  std::string line;
  detail::require(static_cast<bool>(std::getline(is, line)), "read_edge_list: missing header");
  detail::require(line.rfind("n=", 0) == 0, "read_edge_list: header must be n=<count>");
  std::size_t n = 0;
  try {
    std::size_t consumed = 0;
    n = std::stoull(line.substr(2), &consumed);
    detail::require(consumed == line.size() - 2, "read_edge_list: malformed vertex count");
  } catch (const std::logic_error&) {
    throw precondition_error("read_edge_list: malformed vertex count");
  }
  GraphBuilder builder{n};
  while (std::getline(is, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream fields{line};
    long long i = -1;
    long long j = -1;
    std::string rest;
    detail::require(static_cast<bool>(fields >> i >> j) && !(fields >> rest),
                    "read_edge_list: malformed edge line '" + line + "'");
    detail::require(i >= 0 && j >= 0 && static_cast<unsigned long long>(i) < n && static_cast<unsigned long long>(j) < n,
                    "read_edge_list: vertex index out of range");
    builder.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j));
  }
  return std::move(builder).build();
}

}  // namespace keygraph
