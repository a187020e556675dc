#pragma once

// Random generation of key graphs, on/off channel graphs, random geometric graphs
// on the unit torus, and their intersections.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "keygraph/errors.hpp"
#include "keygraph/graph.hpp"
#include "keygraph/model_core.hpp"
#include "keygraph/rng.hpp"

namespace keygraph {

using Key = std::uint64_t;

/// One key ring per node; each ring holds exactly K distinct keys below P, sorted.
class KeyAssignment {
 public:
  KeyAssignment(std::size_t n, KeyParams key) : n_{n}, key_{key}, keys_(n * key.ring_size()) {}

  /// Builds an assignment from explicit rings, validating every ring.
  [[nodiscard]] static KeyAssignment from_rings(KeyParams key, const std::vector<std::vector<Key>>& rings) {
    KeyAssignment out{rings.size(), key};
    for (std::size_t i = 0; i < rings.size(); ++i) {
      std::vector<Key> ring = rings[i];
      std::sort(ring.begin(), ring.end());
      detail::require(ring.size() == key.ring_size(), "KeyAssignment: ring does not hold exactly K keys");
      detail::require(std::adjacent_find(ring.begin(), ring.end()) == ring.end(),
                      "KeyAssignment: ring holds a repeated key");
      detail::require(ring.empty() || ring.back() < key.pool_size(), "KeyAssignment: key outside the pool");
      std::copy(ring.begin(), ring.end(), out.mutable_ring(i).begin());
    }
    return out;
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] const KeyParams& key_params() const noexcept { return key_; }

  [[nodiscard]] std::span<const Key> ring(std::size_t node) const noexcept {
    return {keys_.data() + node * key_.ring_size(), key_.ring_size()};
  }
  [[nodiscard]] std::span<Key> mutable_ring(std::size_t node) noexcept {
    return {keys_.data() + node * key_.ring_size(), key_.ring_size()};
  }

 private:
  std::size_t n_;
  KeyParams key_;
  std::vector<Key> keys_;
};

/// Uniform K-subset of [0, P) by Floyd's algorithm, written sorted into `out`.
inline void sample_subset(std::uint64_t pool, std::span<Key> out, RngStream& rng) {
  const std::uint64_t k = out.size();
  std::size_t filled = 0;
  for (std::uint64_t j = pool - k; j < pool; ++j) {
    const Key t = rng.below(j + 1);
    auto* begin = out.data();
    auto* end = begin + filled;
    auto* pos = std::lower_bound(begin, end, t);
    Key chosen = t;
    if (pos != end && *pos == t) {
      chosen = j;  // j exceeds every key chosen so far
      pos = end;
    }
    std::move_backward(pos, end, end + 1);
    *pos = chosen;
    ++filled;
  }
}

/// Independent uniform key rings for n nodes.
[[nodiscard]] inline KeyAssignment sample_key_rings(std::size_t n, const KeyParams& key, RngStream& rng) {
  KeyAssignment out{n, key};
  for (std::size_t i = 0; i < n; ++i) {
    sample_subset(key.pool_size(), out.mutable_ring(i), rng);
  }
  return out;
}

/// Edge {i, j} iff rings i and j share at least one key.
[[nodiscard]] inline Graph key_graph(const KeyAssignment& assignment) {
  const std::size_t n = assignment.size();
  const std::uint64_t pool = assignment.key_params().pool_size();
  const std::size_t entries = n * assignment.key_params().ring_size();
  // nodes grouped by key: every two holders of a key are adjacent
  std::vector<Vertex> holders(entries);
  std::vector<std::size_t> group_start;
  if (pool <= 16 * entries + 1024) {
    // counting sort by key
    std::vector<std::size_t> offset(pool + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const Key key : assignment.ring(i)) {
        ++offset[key + 1];
      }
    }
    for (std::uint64_t key = 0; key < pool; ++key) {
      offset[key + 1] += offset[key];
    }
    group_start.assign(offset.begin(), offset.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (const Key key : assignment.ring(i)) {
        holders[offset[key]++] = static_cast<Vertex>(i);
      }
    }
  } else {
    std::vector<std::pair<Key, Vertex>> pairs;
    pairs.reserve(entries);
    for (std::size_t i = 0; i < n; ++i) {
      for (const Key key : assignment.ring(i)) {
        pairs.emplace_back(key, static_cast<Vertex>(i));
      }
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t e = 0; e < entries; ++e) {
      if (e == 0 || pairs[e].first != pairs[e - 1].first) {
        group_start.push_back(e);
      }
      holders[e] = pairs[e].second;
    }
    group_start.push_back(entries);
  }
  GraphBuilder builder{n};
  for (std::size_t g = 0; g + 1 < group_start.size(); ++g) {
    for (std::size_t a = group_start[g]; a < group_start[g + 1]; ++a) {
      for (std::size_t b = a + 1; b < group_start[g + 1]; ++b) {
        builder.add_edge_unchecked(holders[a], holders[b]);
      }
    }
  }
  return std::move(builder).build();
}

/// Below this channel probability the Erdos-Renyi sampler jumps between present
/// edges with geometric skips instead of drawing every slot.
inline constexpr double kGeometricSkipBelow = 0.25;

/// Erdos-Renyi graph: each of the C(n,2) pairs present independently with probability alpha.
[[nodiscard]] inline Graph sample_er(std::size_t n, double alpha, RngStream& rng) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "sample_er: alpha must lie in [0, 1]");
  GraphBuilder builder{n};
  if (n < 2 || alpha == 0.0) {
    return std::move(builder).build();
  }
  if (alpha == 1.0) {
    return Graph::complete(n);
  }
  if (alpha < kGeometricSkipBelow) {
    const double log1m = std::log1p(-alpha);
    // walk slots (i, j), i < j, in row-major order
    std::size_t i = 0;
    std::size_t j = 0;  // one before the next slot in row i
    for (;;) {
      std::uint64_t skip = rng.geometric_skip(log1m) + 1;
      while (skip > n - 1 - j) {
        skip -= n - 1 - j;
        ++i;
        if (i + 1 >= n) {
          return std::move(builder).build();
        }
        j = i;
      }
      j += skip;
      builder.add_edge_unchecked(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  // slot (i, j) is present iff the top 53 bits of a draw fall below alpha * 2^53,
  // which is the same event as rng.uniform() < alpha
  const double cutoff = alpha * 0x1.0p53;
  if (builder.is_dense()) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      std::size_t j = i + 1;
      while (j < n) {
        const std::size_t word = j / 64;
        const std::size_t stop = std::min(n, (word + 1) * 64);
        std::uint64_t bits = 0;
        for (; j < stop; ++j) {
          bits |= static_cast<std::uint64_t>(static_cast<double>(rng() >> 11) < cutoff) << (j % 64);
        }
        builder.add_upper_word(static_cast<Vertex>(i), word, bits);
      }
    }
    return std::move(builder).build();
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (static_cast<double>(rng() >> 11) < cutoff) {
        builder.add_edge_unchecked(static_cast<Vertex>(i), static_cast<Vertex>(j));
      }
    }
  }
  return std::move(builder).build();
}

using Point = std::array<double, 2>;
using Positions = std::vector<Point>;

[[nodiscard]] inline double torus_distance_squared(const Point& a, const Point& b) noexcept {
  double dx = std::fabs(a[0] - b[0]);
  double dy = std::fabs(a[1] - b[1]);
  dx = std::min(dx, 1.0 - dx);
  dy = std::min(dy, 1.0 - dy);
  return dx * dx + dy * dy;
}

/// Euclidean distance on the unit torus, each coordinate difference taken as min(|d|, 1 - |d|).
[[nodiscard]] inline double torus_distance(const Point& a, const Point& b) noexcept {
  return std::sqrt(torus_distance_squared(a, b));
}

/// Disk graph on the unit torus: edge {i, j} iff torus distance < rho (strict),
/// decided on squared distances.
[[nodiscard]] inline Graph rgg_from_positions(const Positions& positions, double rho) {
  detail::require(rho > 0.0 && rho < 0.5, "rgg_from_positions: rho must lie in (0, 0.5)");
  const std::size_t n = positions.size();
  GraphBuilder builder{n};
  const double rho2 = rho * rho;
  const auto link = [&](std::size_t i, std::size_t j) {
    if (torus_distance_squared(positions[i], positions[j]) < rho2) {
      builder.add_edge_unchecked(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  };
  const auto cells = static_cast<std::size_t>(std::floor(1.0 / rho));
  if (cells < 3) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        link(i, j);
      }
    }
    return std::move(builder).build();
  }
  // cells of side >= rho; neighbours lie in the 3x3 block around a node's cell
  const auto cell_of = [&](double x) {
    return std::min(static_cast<std::size_t>(x * static_cast<double>(cells)), cells - 1);
  };
  std::vector<std::vector<std::size_t>> grid(cells * cells);
  for (std::size_t i = 0; i < n; ++i) {
    grid[cell_of(positions[i][0]) * cells + cell_of(positions[i][1])].push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cx = cell_of(positions[i][0]);
    const std::size_t cy = cell_of(positions[i][1]);
    for (std::size_t dx = 0; dx < 3; ++dx) {
      for (std::size_t dy = 0; dy < 3; ++dy) {
        const std::size_t nx = (cx + cells + dx - 1) % cells;
        const std::size_t ny = (cy + cells + dy - 1) % cells;
        for (const std::size_t j : grid[nx * cells + ny]) {
          if (j > i) {
            link(i, j);
          }
        }
      }
    }
  }
  return std::move(builder).build();
}

/// n i.i.d. uniform points on [0,1)^2 and their torus disk graph.
[[nodiscard]] inline std::pair<Positions, Graph> sample_rgg_torus(std::size_t n, double rho, RngStream& rng) {
  detail::require(rho > 0.0 && rho < 0.5,
                  "sample_rgg_torus: rho must lie in (0, 0.5); the pi*rho^2 matching is invalid otherwise");
  Positions positions(n);
  for (auto& p : positions) {
    p[0] = rng.uniform();
    p[1] = rng.uniform();
  }
  Graph g = rgg_from_positions(positions, rho);
  return {std::move(positions), std::move(g)};
}

/// Key graph intersected with an on/off channel graph. Key rings are drawn first,
/// then the channel states, from the same stream.
[[nodiscard]] inline Graph sample_kg_intersection(std::size_t n, const ModelParams& params, RngStream& rng) {
  const KeyAssignment rings = sample_key_rings(n, params.key(), rng);
  const Graph keys = key_graph(rings);
  const Graph channel = sample_er(n, params.alpha(), rng);
  return intersect(keys, channel);
}

/// Key graph intersected with a torus disk graph.
[[nodiscard]] inline Graph sample_kh_intersection(std::size_t n, const DiskParams& params, RngStream& rng) {
  const KeyAssignment rings = sample_key_rings(n, params.key(), rng);
  const Graph keys = key_graph(rings);
  const auto [positions, disk] = sample_rgg_torus(n, params.rho(), rng);
  return intersect(keys, disk);
}

}  // namespace keygraph
