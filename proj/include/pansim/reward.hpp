#pragma once

namespace pansim {

struct RewardParams {
  double a = -0.4;
  double b = -0.1;
  double p = 1.5;
  double shaping = -0.02;
  double c_max = 10.0;  // hospital patient capacity
  int max_stage = 4;

  void validate() const;
};

struct RewardBreakdown {
  double health = 0.0;
  double economic = 0.0;
  double shaping = 0.0;

  double total() const { return health + economic + shaping; }
};

// a * max((n_c - C_max) / C_max, 0) + b * stage^p / max_stage^p
//   + shaping * |stage - prev_stage|
RewardBreakdown reward_terms(int n_critical, int stage, int prev_stage, const RewardParams& params);

inline double reward(int n_critical, int stage, int prev_stage, const RewardParams& params) {
  return reward_terms(n_critical, stage, prev_stage, params).total();
}

}  // namespace pansim
