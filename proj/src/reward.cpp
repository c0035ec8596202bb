#include "pansim/reward.hpp"

#include <cmath>
#include <cstdlib>

#include "pansim/types.hpp"

namespace pansim {

void RewardParams::validate() const {
  if (!(c_max > 0.0)) throw ConfigError("reward.c_max must be > 0");
  if (!(p > 0.0)) throw ConfigError("reward.p must be > 0");
  if (max_stage <= 0) throw ConfigError("reward.max_stage must be > 0");
}

RewardBreakdown reward_terms(int n_critical, int stage, int prev_stage, const RewardParams& params) {
  RewardBreakdown r;
  // Zero terms are kept as +0.0 so CSV output never shows "-0".
  const double excess = (n_critical - params.c_max) / params.c_max;
  if (excess > 0.0) r.health = params.a * excess;
  if (stage != 0)
    r.economic = params.b * std::pow(static_cast<double>(stage), params.p) /
                 std::pow(static_cast<double>(params.max_stage), params.p);
  if (stage != prev_stage) r.shaping = params.shaping * std::abs(stage - prev_stage);
  return r;
}

}  // namespace pansim
