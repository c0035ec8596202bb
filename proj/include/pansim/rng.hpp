#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace pansim {

/// Single seeded random stream owned by one simulation.
///
/// Only the raw 64-bit engine output is used; every distribution below is
/// implemented here so trajectories do not depend on the standard library's
/// unspecified distribution algorithms.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Always consumes exactly one draw.
  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  double normal(double mean, double sd);

  double triangular(double min, double mode, double max);

  // Number of failures before the first success of a Bernoulli(p) sequence.
  // p >= 1 returns 0 without drawing; p <= 0 returns UINT64_MAX.
  std::uint64_t geometric(double p);

  // Rounds x down or up with probability equal to its fractional part.
  int stochastic_round(double x);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  bool operator==(const SeededRng&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace pansim
