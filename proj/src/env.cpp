#include "pansim/env.hpp"

#include <algorithm>

namespace pansim {

void EnvConfig::validate() const {
  sim.validate();
  if (horizon_days < 1) throw ConfigError("env.horizon_days must be >= 1");
  if (action_period_days < 1) throw ConfigError("env.action_period_days must be >= 1");
}

PandemicEnv::PandemicEnv(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

ActorObservation PandemicEnv::reset(std::uint64_t seed) {
  sim_ = std::make_unique<Simulation>(config_.sim, seed);
  stage_ = 0;
  episode_return_ = 0.0;
  while (sim_->calendar().day < config_.horizon_days &&
         sim_->perceived().infected < config_.sim.activation_threshold) {
    episode_return_ += sim_->step_day(0).reward.total();
  }
  pre_activation_return_ = episode_return_;
  return observation();
}

int PandemicEnv::max_stage() const { return sim_ ? sim_->max_stage() : 4; }

int PandemicEnv::day() const { return sim_ ? sim_->calendar().day : 0; }

bool PandemicEnv::done() const { return !sim_ || day() >= config_.horizon_days; }

StepResult PandemicEnv::step(int delta) {
  if (delta < -1 || delta > 1) throw ContractViolation("env step: action must be -1, 0 or +1");
  return step_to_stage(std::clamp(stage_ + delta, 0, max_stage()));
}

StepResult PandemicEnv::step_to_stage(int stage) {
  if (done()) throw ContractViolation("env step after the episode finished");
  stage_ = std::clamp(stage, 0, max_stage());
  StepResult r;
  for (int k = 0; k < config_.action_period_days && !done(); ++k) {
    const DayRecord& rec = sim_->step_day(stage_);
    r.reward += rec.reward.total();
    r.days.push_back(rec);
  }
  episode_return_ += r.reward;
  r.done = done();
  r.observation = observation();
  return r;
}

ActorObservation PandemicEnv::observation() const {
  ActorObservation o;
  if (!sim_) return o;
  const auto p = sim_->perceived();
  const float n = std::max<float>(1.0f, static_cast<float>(sim_->world().persons.size()));
  const float cap = static_cast<float>(sim_->reward_params().c_max);
  o.values << p.infected / n, p.critical / n, p.dead / n, p.recovered / n, p.critical / cap,
      static_cast<float>(stage_) / static_cast<float>(max_stage()),
      static_cast<float>(day()) / static_cast<float>(config_.horizon_days);
  return o;
}

CriticObservation PandemicEnv::critic_observation() const {
  CriticObservation o;
  if (!sim_) return o;
  const auto counts = sim_->true_summary();
  const float n = std::max<float>(1.0f, static_cast<float>(sim_->world().persons.size()));
  for (int c = 0; c < kCompartmentCount; ++c) o.values(c) = counts[c] / n;
  const int critical = counts[static_cast<int>(Compartment::hospitalized)] +
                       counts[static_cast<int>(Compartment::needs_hospital)];
  o.values(kCompartmentCount) = static_cast<float>(stage_) / static_cast<float>(max_stage());
  o.values(kCompartmentCount + 1) = critical / static_cast<float>(sim_->reward_params().c_max);
  o.values(kCompartmentCount + 2) =
      static_cast<float>(day()) / static_cast<float>(config_.horizon_days);
  return o;
}

double run_episode(const EnvConfig& config, const DeltaPolicy& decide, std::uint64_t seed,
                   std::vector<DayRecord>* records) {
  PandemicEnv env(config);
  ActorObservation obs = env.reset(seed);
  while (!env.done()) obs = env.step(decide(obs)).observation;
  if (records) *records = env.simulation().records();
  return env.episode_return();
}

}  // namespace pansim
