#include "pansim/sac.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pansim {

void SacHyperparams::validate() const {
  if (!(critic_lr > 0.0) || !(actor_lr > 0.0)) throw ConfigError("sac learning rates must be > 0");
  if (!(discount > 0.0 && discount <= 1.0)) throw ConfigError("sac.discount must lie in (0, 1]");
  if (!(target_tau > 0.0 && target_tau <= 1.0)) throw ConfigError("sac.target_tau must lie in (0, 1]");
  if (entropy_alpha < 0.0) throw ConfigError("sac.entropy_alpha must be >= 0");
  if (hidden_units < 1 || hidden_layers < 1) throw ConfigError("sac network must have a hidden layer");
  if (batch_size < 1 || replay_capacity < batch_size)
    throw ConfigError("sac.replay_capacity must be >= batch_size >= 1");
  if (total_steps < 0 || warmup_steps < 0 || updates_per_step < 0)
    throw ConfigError("sac step counts must be >= 0");
}

nlohmann::json PolicyParams::to_json() const {
  return {{"format", "pansim-policy"},
          {"version", kVersion},
          {"obs_dim", actor.input_dim()},
          {"actions", actor.output_dim()},
          {"actor", actor.to_json()}};
}

PolicyParams PolicyParams::from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "pansim-policy") throw ConfigError("not a policy checkpoint");
  if (j.value("version", 0) != kVersion)
    throw ConfigError("unsupported checkpoint version " + std::to_string(j.value("version", 0)));
  PolicyParams p{Mlp::from_json(j.at("actor"))};
  if (p.actor.input_dim() != ActorObservation::kDim || p.actor.output_dim() != kActionCount)
    throw ConfigError("checkpoint network shape does not match the environment");
  return p;
}

void PolicyParams::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << to_json().dump() << '\n';
}

PolicyParams PolicyParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read checkpoint " + path);
  return from_json(nlohmann::json::parse(in));
}

Vector action_probabilities(const PolicyParams& params, const ActorObservation& obs) {
  if (obs.values.size() != params.actor.input_dim())
    throw ContractViolation("policy_act: observation dimension mismatch");
  return softmax_columns(params.actor.predict(obs.values)).col(0);
}

int policy_act(const PolicyParams& params, const ActorObservation& obs, bool deterministic,
               SeededRng& rng) {
  Vector p = action_probabilities(params, obs);
  if (deterministic) {
    Eigen::Index best = 0;
    p.maxCoeff(&best);
    return static_cast<int>(best);
  }
  double u = rng.uniform();
  for (int a = 0; a < p.size(); ++a) {
    u -= p(a);
    if (u < 0.0) return a;
  }
  return static_cast<int>(p.size()) - 1;
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

Batch ReplayBuffer::sample(std::size_t batch_size, SeededRng& rng) const {
  const auto& first = items_.front();
  const auto n = static_cast<Eigen::Index>(batch_size);
  Batch b;
  b.obs.resize(first.obs.size(), n);
  b.next_obs.resize(first.obs.size(), n);
  b.critic_obs.resize(first.critic_obs.size(), n);
  b.next_critic_obs.resize(first.critic_obs.size(), n);
  b.actions.resize(batch_size);
  b.rewards.resize(n);
  b.not_done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& t = items_[rng.below(items_.size())];
    b.obs.col(j) = t.obs;
    b.next_obs.col(j) = t.next_obs;
    b.critic_obs.col(j) = t.critic_obs;
    b.next_critic_obs.col(j) = t.next_critic_obs;
    b.actions[j] = t.action;
    b.rewards(j) = t.reward;
    b.not_done(j) = t.done ? 0.0f : 1.0f;
  }
  return b;
}

namespace {

std::vector<int> hidden_dims(const SacHyperparams& h) {
  return std::vector<int>(h.hidden_layers, h.hidden_units);
}

Matrix log_softmax_columns(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const float mx = logits.col(c).maxCoeff();
    const float lse = mx + std::log((logits.col(c).array() - mx).exp().sum());
    out.col(c) = logits.col(c).array() - lse;
  }
  return out;
}

}  // namespace

DiscreteSac::DiscreteSac(int actor_dim, int critic_dim, int actions, const SacHyperparams& hyper,
                         SeededRng& rng)
    : hyper_(hyper),
      actor_(actor_dim, hidden_dims(hyper), actions, rng),
      q1_(critic_dim, hidden_dims(hyper), actions, rng),
      q2_(critic_dim, hidden_dims(hyper), actions, rng),
      q1_target_(q1_),
      q2_target_(q2_),
      actor_opt_(actor_, static_cast<float>(hyper.actor_lr)),
      q1_opt_(q1_, static_cast<float>(hyper.critic_lr)),
      q2_opt_(q2_, static_cast<float>(hyper.critic_lr)) {
  hyper_.validate();
}

double DiscreteSac::critic_step(const Batch& b) {
  const auto n = b.obs.cols();
  const float alpha = static_cast<float>(hyper_.entropy_alpha);
  const float gamma = static_cast<float>(hyper_.discount);

  // Soft state value of the next state under the current actor.
  const Matrix next_logits = actor_.predict(b.next_obs);
  const Matrix next_p = softmax_columns(next_logits);
  const Matrix next_logp = log_softmax_columns(next_logits);
  const Matrix next_q =
      q1_target_.predict(b.next_critic_obs).cwiseMin(q2_target_.predict(b.next_critic_obs));
  const Vector next_v =
      (next_p.array() * (next_q.array() - alpha * next_logp.array())).colwise().sum().transpose();
  const Vector target = b.rewards.array() + gamma * b.not_done.array() * next_v.array();

  double loss = 0.0;
  for (auto [net, opt] : {std::pair{&q1_, &q1_opt_}, std::pair{&q2_, &q2_opt_}}) {
    net->zero_grad();
    const Matrix& q = net->forward(b.critic_obs);
    Matrix grad = Matrix::Zero(q.rows(), q.cols());
    for (Eigen::Index j = 0; j < n; ++j) {
      const float err = q(b.actions[j], j) - target(j);
      loss += static_cast<double>(err) * err;
      grad(b.actions[j], j) = err / static_cast<float>(n);
    }
    net->backward(grad);
    opt->step();
  }
  return loss / (2.0 * static_cast<double>(n));
}

double DiscreteSac::critic_update(const Batch& batch) { return critic_step(batch); }

SacLosses DiscreteSac::update(const Batch& b) {
  SacLosses out;
  out.critic_loss = critic_step(b);

  const auto n = b.obs.cols();
  const float alpha = static_cast<float>(hyper_.entropy_alpha);
  const Matrix q = q1_.predict(b.critic_obs).cwiseMin(q2_.predict(b.critic_obs));
  actor_.zero_grad();
  const Matrix logits = actor_.forward(b.obs);
  const Matrix p = softmax_columns(logits);
  const Matrix logp = log_softmax_columns(logits);
  const Matrix f = alpha * logp - q;
  const Eigen::RowVectorXf per_sample = (p.array() * f.array()).colwise().sum();
  // d/dz_k of sum_a p_a f_a  =  p_k (f_k - sum_a p_a f_a)   (the log-prob
  // derivative term cancels for a softmax).
  Matrix grad = p.array() * (f.rowwise() - per_sample).array();
  grad /= static_cast<float>(n);
  actor_.backward(grad);
  actor_opt_.step();

  out.actor_loss = per_sample.mean();
  out.entropy = -(p.array() * logp.array()).colwise().sum().mean();

  const float tau = static_cast<float>(hyper_.target_tau);
  q1_target_.soft_update(q1_, tau);
  q2_target_.soft_update(q2_, tau);
  return out;
}

std::uint64_t training_episode_seed(std::uint64_t seed, int episode) {
  return 1'000'000'000ULL + seed * 1'000'003ULL + static_cast<std::uint64_t>(episode);
}

TrainResult sac_train(const EnvConfig& env_config, const SacHyperparams& hyper, std::uint64_t seed,
                      const std::function<void(const TrainLogRow&)>& on_episode) {
  hyper.validate();
  SeededRng rng(seed);
  DiscreteSac sac(ActorObservation::kDim, CriticObservation::kDim, kActionCount, hyper, rng);
  ReplayBuffer buffer(hyper.replay_capacity);
  PandemicEnv env(env_config);

  TrainResult result;
  int episode = 0;
  ActorObservation obs = env.reset(training_episode_seed(seed, episode));
  CriticObservation critic_obs = env.critic_observation();
  SacLosses last;
  double loss_sum[3] = {0, 0, 0};
  long loss_count = 0;

  auto finish_episode = [&](long step) {
    TrainLogRow row;
    row.step = step;
    row.episode = episode;
    row.episode_return = env.episode_return();
    if (loss_count > 0) {
      row.critic_loss = loss_sum[0] / loss_count;
      row.actor_loss = loss_sum[1] / loss_count;
      row.entropy = loss_sum[2] / loss_count;
    }
    loss_sum[0] = loss_sum[1] = loss_sum[2] = 0.0;
    loss_count = 0;
    result.curve.push_back(row);
    if (on_episode) on_episode(row);
    ++episode;
    obs = env.reset(training_episode_seed(seed, episode));
    critic_obs = env.critic_observation();
  };

  long step = 0;
  int idle_resets = 0;
  while (step < hyper.total_steps) {
    if (env.done()) {
      // The outbreak never reached the activation threshold.
      if (++idle_resets > 1000) throw std::runtime_error("sac_train: episodes never activate");
      finish_episode(step);
      continue;
    }
    const int action = step < hyper.warmup_steps ? static_cast<int>(rng.below(kActionCount))
                                                 : policy_act(sac.policy(), obs, false, rng);
    StepResult r = env.step(action_delta(action));
    CriticObservation next_critic = env.critic_observation();
    buffer.push({obs.values, critic_obs.values, action, static_cast<float>(r.reward),
                 r.observation.values, next_critic.values, r.done});
    obs = r.observation;
    critic_obs = next_critic;
    ++step;

    if (buffer.size() >= hyper.batch_size) {
      for (int u = 0; u < hyper.updates_per_step; ++u) {
        last = sac.update(buffer.sample(hyper.batch_size, rng));
        if (!std::isfinite(last.critic_loss) || !std::isfinite(last.actor_loss)) {
          std::ostringstream msg;
          msg << "sac_train diverged at step " << step << " (critic loss " << last.critic_loss
              << ", actor loss " << last.actor_loss << ")";
          throw std::runtime_error(msg.str());
        }
        loss_sum[0] += last.critic_loss;
        loss_sum[1] += last.actor_loss;
        loss_sum[2] += last.entropy;
        ++loss_count;
      }
    }
    if (r.done) finish_episode(step);
  }
  result.policy = sac.policy();
  result.steps = step;
  result.episodes = episode;
  return result;
}

std::vector<double> evaluate_policy(const EnvConfig& config, const PolicyParams& params,
                                    const std::vector<std::uint64_t>& seeds, bool deterministic) {
  std::vector<double> out;
  for (auto seed : seeds) {
    SeededRng rng(seed ^ 0x5eedULL);
    out.push_back(run_episode(
        config, [&](const ActorObservation& o) { return action_delta(policy_act(params, o, deterministic, rng)); },
        seed));
  }
  return out;
}

std::vector<double> evaluate_random(const EnvConfig& config, const std::vector<std::uint64_t>& seeds,
                                    std::uint64_t action_seed) {
  std::vector<double> out;
  SeededRng rng(action_seed);
  for (auto seed : seeds)
    out.push_back(run_episode(
        config, [&](const ActorObservation&) { return action_delta(static_cast<int>(rng.below(kActionCount))); },
        seed));
  return out;
}

void write_training_curve_csv(std::ostream& out, const std::vector<TrainLogRow>& rows,
                              const std::string& metadata) {
  out << "# " << metadata << '\n' << "step,episode,return,critic_loss,actor_loss,entropy\n";
  for (const auto& r : rows) {
    out << r.step << ',' << r.episode << ',' << format_number(r.episode_return) << ','
        << format_number(r.critic_loss) << ',' << format_number(r.actor_loss) << ','
        << format_number(r.entropy) << '\n';
  }
}

}  // namespace pansim
