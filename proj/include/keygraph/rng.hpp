#pragma once

// Reproducible random streams. A stream is identified by (master_seed, stream_id);
// the same pair always yields the same sequence on every platform, independent of
// which thread draws from it.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace keygraph {

/// SplitMix64 finalizer. Fixed mixing function used for all seed/stream derivation.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream id of trial `trial_index` within parameter point `point_index`:
/// mix64(point_index * 2^32 + trial_index).
[[nodiscard]] constexpr std::uint64_t trial_stream_id(std::uint64_t point_index, std::uint64_t trial_index) noexcept {
  return mix64((point_index << 32) + trial_index);
}

/// xoshiro256** generator seeded from (master_seed, stream_id).
///
/// Satisfies UniformRandomBitGenerator, but the samplers use the member
/// helpers below instead of <random> distributions, whose output is
/// implementation-defined.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : master_seed_{master_seed}, stream_id_{stream_id} {
    std::uint64_t s = mix64(master_seed) ^ mix64(stream_id ^ 0x6a09e667f3bcc909ULL);
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      word = mix64(s);
    }
  }

  [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = std::rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound >= 1 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Bernoulli(p) draw.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Number of failures before the first success of a Bernoulli(p) sequence, 0 < p < 1.
  std::uint64_t geometric_skip(double log1m_p) noexcept {
    // 1 - uniform() lies in (0, 1], so the log is finite
    const double draw = std::floor(std::log(1.0 - uniform()) / log1m_p);
    if (draw >= 1.8e19) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(draw);
  }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace keygraph
