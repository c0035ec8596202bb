#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "pansim/env.hpp"
#include "pansim/nn.hpp"
#include "pansim/rng.hpp"

namespace pansim {

struct SacHyperparams {
  double critic_lr = 1e-3;
  double actor_lr = 1e-4;
  double entropy_alpha = 0.01;
  double target_tau = 0.005;
  double discount = 0.99;
  int hidden_units = 128;
  int hidden_layers = 2;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 64;
  long total_steps = 1000000;
  long warmup_steps = 1000;  // uniform random actions before the actor takes over
  int updates_per_step = 1;

  void validate() const;
};

/// Trained actor plus what is needed to use it.
struct PolicyParams {
  static constexpr int kVersion = 1;
  Mlp actor;

  nlohmann::json to_json() const;
  static PolicyParams from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static PolicyParams load(const std::string& path);
};

Vector action_probabilities(const PolicyParams& params, const ActorObservation& obs);
// Index into {-1, 0, +1}. Deterministic mode takes the argmax (lowest index
// on ties) and does not touch `rng`.
int policy_act(const PolicyParams& params, const ActorObservation& obs, bool deterministic,
               SeededRng& rng);

struct Transition {
  Vector obs;
  Vector critic_obs;
  int action = 0;
  float reward = 0.0f;
  Vector next_obs;
  Vector next_critic_obs;
  bool done = false;
};

struct Batch {
  Matrix obs, critic_obs, next_obs, next_critic_obs;  // one column per sample
  std::vector<int> actions;
  Vector rewards;
  Vector not_done;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  Batch sample(std::size_t batch_size, SeededRng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

struct SacLosses {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
};

/// Discrete-action soft actor-critic with twin critics and target copies.
/// The actor reads actor observations, the critics read critic observations.
class DiscreteSac {
 public:
  DiscreteSac(int actor_dim, int critic_dim, int actions, const SacHyperparams& hyper,
              SeededRng& rng);

  SacLosses update(const Batch& batch);
  // Critic-only step (used by sanity checks).
  double critic_update(const Batch& batch);

  PolicyParams policy() const { return {actor_}; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic(int i) const { return i == 0 ? q1_ : q2_; }

 private:
  double critic_step(const Batch& batch);
  SacHyperparams hyper_;
  Mlp actor_, q1_, q2_, q1_target_, q2_target_;
  Adam actor_opt_, q1_opt_, q2_opt_;
};

struct TrainLogRow {
  long step = 0;
  int episode = 0;
  double episode_return = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams policy;
  std::vector<TrainLogRow> curve;  // one row per finished episode
  long steps = 0;
  int episodes = 0;
};

std::uint64_t training_episode_seed(std::uint64_t seed, int episode);

TrainResult sac_train(const EnvConfig& env_config, const SacHyperparams& hyper,
                      std::uint64_t seed,
                      const std::function<void(const TrainLogRow&)>& on_episode = {});

// Per-seed episode returns of a trained actor.
std::vector<double> evaluate_policy(const EnvConfig& config, const PolicyParams& params,
                                    const std::vector<std::uint64_t>& seeds, bool deterministic = true);
// Per-seed returns of uniformly random actions.
std::vector<double> evaluate_random(const EnvConfig& config, const std::vector<std::uint64_t>& seeds,
                                    std::uint64_t action_seed);

void write_training_curve_csv(std::ostream& out, const std::vector<TrainLogRow>& rows,
                              const std::string& metadata);

}  // namespace pansim
