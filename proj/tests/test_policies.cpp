#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "pansim/env.hpp"
#include "pansim/heuristics.hpp"
#include "pansim/nn.hpp"
#include "pansim/sac.hpp"

using namespace pansim;

namespace {

PolicyObservation obs_at(int day, int infected) {
  PolicyObservation o;
  o.day = day;
  o.perceived.infected = infected;
  o.population = 1000;
  o.hospital_capacity = 10;
  return o;
}

EnvConfig small_env(int horizon = 40) {
  EnvConfig c;
  c.horizon_days = horizon;
  return c;
}

}  // namespace

TEST(S040, StageSchedule) {
  S040Policy s040(0, "S0-4-0"), fi(5, "S0-4-0-FI"), gi(10, "S0-4-0-GI");
  EXPECT_EQ(s040.stage_at(0), 4);
  EXPECT_EQ(s040.stage_at(29), 4);
  EXPECT_EQ(s040.stage_at(30), 0);
  EXPECT_EQ(fi.stage_at(30), 3);
  EXPECT_EQ(fi.stage_at(35), 2);
  EXPECT_EQ(fi.stage_at(44), 1);
  EXPECT_EQ(fi.stage_at(45), 0);
  EXPECT_EQ(gi.stage_at(30 + 12), 2);
  EXPECT_EQ(gi.stage_at(59), 1);
  EXPECT_EQ(gi.stage_at(60), 0);
}

TEST(S040, TriggersAtThreshold) {
  S040Policy p(10, "gi");
  EXPECT_EQ(p.decide(obs_at(0, 3)), 0);
  EXPECT_EQ(p.decide(obs_at(1, 9)), 0);
  EXPECT_EQ(p.decide(obs_at(2, 10)), 4);
  EXPECT_EQ(p.decide(obs_at(3, 2)), 4);  // stays triggered
  EXPECT_EQ(p.decide(obs_at(32, 0)), 3);
  p.reset();
  EXPECT_EQ(p.decide(obs_at(40, 0)), 0);
}

TEST(Heuristics, NamesAndConstants) {
  for (auto name : benchmark_policy_names()) EXPECT_EQ(make_heuristic_policy(name)->name(), name);
  EXPECT_EQ(make_heuristic_policy("s040gi")->name(), "S0-4-0-GI");
  auto c3 = make_heuristic_policy("constant3");
  EXPECT_EQ(c3->decide(obs_at(5, 100)), 3);
  EXPECT_EQ(make_heuristic_policy("s2")->decide(obs_at(0, 0)), 2);
  EXPECT_EQ(make_heuristic_policy("SWE")->stage_table(), StageTableKind::swedish);
  EXPECT_THROW(make_heuristic_policy("constant"), ConfigError);
  EXPECT_THROW(make_heuristic_policy("zzz"), ConfigError);
}

TEST(Heuristics, ItalianEscalatesOnDoubling) {
  ItalianPolicy p;
  auto o = obs_at(0, 10);
  o.max_stage = 4;
  EXPECT_EQ(p.decide(o), 1);
  o.perceived.infected = 19;
  EXPECT_EQ(p.decide(o), 1);
  o.perceived.infected = 20;
  EXPECT_EQ(p.decide(o), 2);
  o.perceived.infected = 5;
  EXPECT_EQ(p.decide(o), 2);  // never relaxes
  o.perceived.infected = 1000;
  EXPECT_EQ(p.decide(o), 4);
}

TEST(Env, StepContract) {
  PandemicEnv env(small_env(30));
  auto o = env.reset(3);
  ASSERT_EQ(o.values.size(), ActorObservation::kDim);
  EXPECT_EQ(env.stage(), 0);
  for (int i = 0; i < 4; ++i) env.step(+1);
  EXPECT_EQ(env.stage(), 4);
  auto r = env.step(+1);
  EXPECT_EQ(env.stage(), 4);
  ASSERT_EQ(r.days.size(), 1u);
  EXPECT_EQ(r.days[0].reward.shaping, 0.0);
  EXPECT_THROW(env.step(2), ContractViolation);
  while (!env.done()) env.step(0);
  EXPECT_THROW(env.step(0), ContractViolation);
  EXPECT_EQ(env.day(), 30);
}

TEST(Env, ActionPeriodGroupsDays) {
  EnvConfig daily = small_env(120);
  EnvConfig weekly = daily;
  weekly.action_period_days = 7;
  PandemicEnv a(daily), b(weekly);
  a.reset(11);
  b.reset(11);
  const int start = b.day();
  EXPECT_EQ(a.day(), start);
  int decisions = 0;
  while (!b.done()) {
    auto r = b.step(0);
    EXPECT_LE(r.days.size(), 7u);
    ++decisions;
  }
  EXPECT_EQ(decisions, (120 - start + 6) / 7);
  // the same days, chunked differently
  while (!a.done()) a.step(0);
  EXPECT_NEAR(a.episode_return(), b.episode_return(), 1e-9);
}

TEST(Env, RunEpisodeMatchesManualLoop) {
  EnvConfig c = small_env(25);
  std::vector<DayRecord> rec;
  const double ret = run_episode(c, [](const ActorObservation&) { return +1; }, 5, &rec);
  PandemicEnv env(c);
  env.reset(5);
  while (!env.done()) env.step(+1);
  EXPECT_DOUBLE_EQ(ret, env.episode_return());
  EXPECT_EQ(rec.size(), 25u);
}

TEST(Mlp, GradientMatchesFiniteDifference) {
  SeededRng rng(1);
  Mlp net(4, {6, 5}, 3, rng);
  Matrix x = Matrix::Random(4, 3);
  Matrix g = Matrix::Random(3, 3);
  auto loss = [&](const Mlp& m) { return static_cast<double>((m.predict(x).array() * g.array()).sum()); };
  net.zero_grad();
  net.forward(x);
  net.backward(g);
  const float h = 1e-2f;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (int i = 0; i < net.weights()[l].rows(); ++i)
      for (int j = 0; j < net.weights()[l].cols(); ++j) {
        Mlp plus = net, minus = net;
        plus.weights()[l](i, j) += h;
        minus.weights()[l](i, j) -= h;
        const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
        EXPECT_NEAR(net.weight_grads()[l](i, j), fd, 2e-2 * std::max(1.0, std::abs(fd)));
      }
    for (int i = 0; i < net.biases()[l].size(); ++i) {
      Mlp plus = net, minus = net;
      plus.biases()[l](i) += h;
      minus.biases()[l](i) -= h;
      const double fd = (loss(plus) - loss(minus)) / (2.0 * h);
      EXPECT_NEAR(net.bias_grads()[l](i), fd, 2e-2 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Mlp, AdamFitsLinearTarget) {
  SeededRng rng(2);
  Mlp net(2, {16}, 1, rng);
  Adam opt(net, 1e-2f);
  Matrix x = Matrix::Random(2, 64);
  Matrix y = (x.row(0) * 2.0f - x.row(1) * 0.5f).eval();
  auto mse = [&] { return (net.predict(x) - y).array().square().mean(); };
  const float before = mse();
  for (int i = 0; i < 500; ++i) {
    net.zero_grad();
    const Matrix& out = net.forward(x);
    net.backward(2.0f * (out - y) / static_cast<float>(x.cols()));
    opt.step();
  }
  EXPECT_LT(mse(), 0.05f * before);
}

TEST(Mlp, SoftUpdateAndJson) {
  SeededRng rng(3);
  Mlp a(3, {4}, 2, rng), b(3, {4}, 2, rng);
  Mlp c = b;
  c.soft_update(a, 1.0f);
  EXPECT_TRUE(c == a);
  EXPECT_TRUE(Mlp::from_json(a.to_json()) == a);
  Matrix s = softmax_columns(Matrix::Random(3, 5));
  for (int j = 0; j < 5; ++j) EXPECT_NEAR(s.col(j).sum(), 1.0f, 1e-6f);
}

TEST(Checkpoint, RoundTripAndShapeMismatch) {
  SeededRng rng(4);
  PolicyParams p{Mlp(ActorObservation::kDim, {8, 8}, kActionCount, rng)};
  const auto path = (std::filesystem::temp_directory_path() / "pansim_ckpt_test.json").string();
  p.save(path);
  auto q = PolicyParams::load(path);
  EXPECT_TRUE(q.actor == p.actor);
  std::remove(path.c_str());

  auto j = p.to_json();
  j["version"] = 99;
  EXPECT_THROW(PolicyParams::from_json(j), ConfigError);
  PolicyParams wrong{Mlp(5, {8}, kActionCount, rng)};
  EXPECT_THROW(PolicyParams::from_json(wrong.to_json()), ConfigError);
  EXPECT_THROW(PolicyParams::load("/nonexistent/ckpt.json"), ConfigError);
}

TEST(PolicyAct, DeterministicAndProbabilities) {
  SeededRng rng(5);
  PolicyParams p{Mlp(ActorObservation::kDim, {8}, kActionCount, rng)};
  ActorObservation o;
  o.values << 0.1f, 0.01f, 0.0f, 0.2f, 0.5f, 0.25f, 0.3f;
  Vector probs = action_probabilities(p, o);
  EXPECT_NEAR(probs.sum(), 1.0f, 1e-6f);
  SeededRng r1(9), r2(10);
  const int a = policy_act(p, o, true, r1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(policy_act(p, o, true, r2), a);
  int best = 0;
  probs.maxCoeff(&best);
  EXPECT_EQ(a, best);
  ActorObservation bad;
  bad.values = Vector::Zero(3);
  EXPECT_THROW(policy_act(p, bad, true, r1), ContractViolation);
}

TEST(PolicyAct, UniformLogitsSampleUniformly) {
  SeededRng rng(6);
  PolicyParams p{Mlp(ActorObservation::kDim, {4}, kActionCount, rng)};
  p.actor.weights().back().setZero();
  p.actor.biases().back().setZero();
  ActorObservation o;
  SeededRng draw(7);
  int counts[kActionCount] = {0, 0, 0};
  const int n = 30000;
  for (int i = 0; i < n; ++i) ++counts[policy_act(p, o, false, draw)];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 1.0 / 3.0, 0.015);
}

TEST(Sac, CriticLossDecreasesOnFixedBatch) {
  SacHyperparams h;
  h.hidden_units = 32;
  SeededRng rng(8);
  DiscreteSac sac(ActorObservation::kDim, CriticObservation::kDim, kActionCount, h, rng);
  ReplayBuffer buf(256);
  SeededRng data(9);
  for (int i = 0; i < 64; ++i) {
    Transition t;
    t.obs = Vector::Random(ActorObservation::kDim);
    t.next_obs = Vector::Random(ActorObservation::kDim);
    t.critic_obs = Vector::Random(CriticObservation::kDim);
    t.next_critic_obs = Vector::Random(CriticObservation::kDim);
    t.action = static_cast<int>(data.below(kActionCount));
    t.reward = static_cast<float>(data.uniform() - 0.5);
    t.done = true;
    buf.push(t);
  }
  Batch b = buf.sample(64, data);
  const double first = sac.critic_update(b);
  double last = first;
  for (int i = 0; i < 100; ++i) last = sac.critic_update(b);
  EXPECT_LT(last, 0.5 * first);
}

TEST(Sac, ReplayBufferRing) {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    Transition t;
    t.obs = Vector::Constant(1, static_cast<float>(i));
    t.next_obs = t.obs;
    t.critic_obs = t.obs;
    t.next_critic_obs = t.obs;
    buf.push(t);
  }
  EXPECT_EQ(buf.size(), 3u);
  SeededRng rng(1);
  Batch b = buf.sample(50, rng);
  EXPECT_GE(b.obs.minCoeff(), 2.0f);
}

TEST(Sac, ZeroStepsLeavesActorAtInitialization) {
  SacHyperparams h;
  h.hidden_units = 16;
  h.total_steps = 0;
  auto result = sac_train(small_env(20), h, 17);
  SeededRng rng(17);
  DiscreteSac fresh(ActorObservation::kDim, CriticObservation::kDim, kActionCount, h, rng);
  EXPECT_TRUE(result.policy.actor == fresh.actor());
  EXPECT_EQ(result.steps, 0);
}

TEST(Sac, ShortTrainingIsReproducible) {
  SacHyperparams h;
  h.hidden_units = 16;
  h.total_steps = 150;
  h.warmup_steps = 50;
  h.batch_size = 16;
  h.replay_capacity = 200;
  auto a = sac_train(small_env(30), h, 21);
  auto b = sac_train(small_env(30), h, 21);
  EXPECT_TRUE(a.policy.actor == b.policy.actor);
  EXPECT_EQ(a.curve.size(), b.curve.size());
  EXPECT_GT(a.episodes, 0);
}
