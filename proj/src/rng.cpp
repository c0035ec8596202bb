#include "pansim/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pansim {

std::uint64_t SeededRng::below(std::uint64_t n) {
  // Rejection on the biased tail keeps the result exactly uniform.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

double SeededRng::normal(double mean, double sd) {
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededRng::triangular(double min, double mode, double max) {
  double u = uniform();
  if (max <= min) return min;
  double split = (mode - min) / (max - min);
  if (u < split) return min + std::sqrt(u * (max - min) * (mode - min));
  return max - std::sqrt((1.0 - u) * (max - min) * (max - mode));
}

std::uint64_t SeededRng::geometric(double p) {
  if (p >= 1.0) return 0;
  if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
  double u = uniform();
  double k = std::floor(std::log1p(-u) / std::log1p(-p));
  if (!(k < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(k);
}

int SeededRng::stochastic_round(double x) {
  double base = std::floor(x);
  double frac = x - base;
  return static_cast<int>(base) + (uniform() < frac ? 1 : 0);
}

}  // namespace pansim
