#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "pansim/engine.hpp"
#include "pansim/nn.hpp"

namespace pansim {

struct EnvConfig {
  SimConfig sim;
  int horizon_days = 120;
  int action_period_days = 1;

  void validate() const;
};

/// Actor input: perceived data only.
///   [infected/N, critical/N, dead/N, recovered/N, critical/C_max, stage/4, day/horizon]
struct ActorObservation {
  static constexpr int kDim = 7;
  Vector values = Vector::Zero(kDim);
};

/// Critic input: the true infection summary.
///   [10 compartment fractions, stage/4, critical/C_max, day/horizon]
struct CriticObservation {
  static constexpr int kDim = kCompartmentCount + 3;
  Vector values = Vector::Zero(kDim);
};

inline constexpr int kActionCount = 3;  // stage delta -1, 0, +1
inline int action_delta(int action_index) { return action_index - 1; }

struct StepResult {
  ActorObservation observation;
  double reward = 0.0;
  bool done = false;
  std::vector<DayRecord> days;
};

/// Episodic environment around one Simulation. reset() fast-forwards stage-0
/// days until perceived infections reach the activation threshold; their
/// rewards are kept in pre_activation_return().
class PandemicEnv {
 public:
  explicit PandemicEnv(EnvConfig config);

  ActorObservation reset(std::uint64_t seed);
  // delta in {-1, 0, +1}; stage is clamped to [0, max].
  StepResult step(int delta);
  // Any target stage (free-stage mode, heuristics).
  StepResult step_to_stage(int stage);

  ActorObservation observation() const;
  CriticObservation critic_observation() const;

  bool done() const;
  int day() const;
  int stage() const { return stage_; }
  int max_stage() const;
  double episode_return() const { return episode_return_; }
  double pre_activation_return() const { return pre_activation_return_; }
  const EnvConfig& config() const { return config_; }
  // Only for post-episode reporting; agents must not read it.
  const Simulation& simulation() const { return *sim_; }

 private:
  EnvConfig config_;
  std::unique_ptr<Simulation> sim_;
  int stage_ = 0;
  double episode_return_ = 0.0;
  double pre_activation_return_ = 0.0;
};

/// Episode runner for evaluation: `decide` maps the actor observation to a
/// stage delta. Returns the full episode return.
using DeltaPolicy = std::function<int(const ActorObservation&)>;
double run_episode(const EnvConfig& config, const DeltaPolicy& decide, std::uint64_t seed,
                   std::vector<DayRecord>* records = nullptr);

}  // namespace pansim
