#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <set>

#include "pansim/interventions.hpp"

using namespace pansim;
using K = LocationKind;

TEST(Regulation, EffectiveRates) {
  Regulation r;
  ContactRates base{0.1, 0.01, 0.01};
  EXPECT_EQ(effective_contact_rates(base, r), base);
  r.social_distancing = 1.0;
  EXPECT_EQ(effective_contact_rates(base, r), (ContactRates{0, 0, 0}));
  r.social_distancing = 0.7;
  auto e = effective_contact_rates(base, r);
  EXPECT_NEAR(e.worker_worker, 0.03, 1e-15);
  EXPECT_NEAR(e.worker_visitor, 0.003, 1e-15);
  EXPECT_NEAR(e.visitor_visitor, 0.003, 1e-15);
}

TEST(Regulation, TransmissionMultiplier) {
  Regulation r;
  EXPECT_EQ(transmission_multiplier(r, true), 1.0);
  r.wear_facial_coverings = true;
  EXPECT_NEAR(transmission_multiplier(r, true), 0.6, 1e-15);
  r.practice_good_hygiene = true;
  EXPECT_NEAR(transmission_multiplier(r, true), 0.48, 1e-15);
  EXPECT_EQ(transmission_multiplier(r, false), 1.0);
}

TEST(StageTables, FiveStage) {
  auto t = stage_table(StageTableKind::five_stage);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_FALSE(t[0].has_advisory());
  EXPECT_EQ(t[3].social_distancing, 0.5);
  EXPECT_TRUE(t[3].wear_facial_coverings);
  EXPECT_EQ(t[3].gathering_limit, (GatheringLimit{0, 0}));
  EXPECT_EQ(t[3].locked_kinds, (KindSet{K::school, K::hair_salon}));
  EXPECT_EQ(t[2].locked_kinds, (KindSet{K::school, K::hair_salon}));
  EXPECT_EQ(t[4].locked_kinds, (KindSet{K::school, K::hair_salon, K::office, K::retail}));
  EXPECT_EQ(t[4].social_distancing, 0.7);
  for (std::size_t s = 1; s < t.size(); ++s) {
    EXPECT_GE(t[s].social_distancing, t[s - 1].social_distancing);
    EXPECT_TRUE(t[s - 1].locked_kinds.subset_of(t[s].locked_kinds));
  }
}

TEST(StageTables, SwedishAndItalian) {
  auto swe = stage_table(StageTableKind::swedish);
  ASSERT_EQ(swe.size(), 2u);
  EXPECT_EQ(swe[1].social_distancing, 0.7);
  EXPECT_FALSE(swe[1].wear_facial_coverings);
  EXPECT_EQ(swe[1].gathering_limit, (GatheringLimit{50, 50}));
  EXPECT_TRUE(swe[1].locked_kinds.empty());
  auto ita = stage_table(StageTableKind::italian);
  ASSERT_EQ(ita.size(), 5u);
  EXPECT_EQ(ita[4].social_distancing, 0.8);
  EXPECT_EQ(ita[4].locked_kinds, (KindSet{K::office, K::school, K::hair_salon, K::retail}));
  EXPECT_THROW(stage_table("FRA"), ConfigError);
  EXPECT_EQ(stage_table("SWE"), swe);
}

TEST(Presets, TenNamedStrategies) {
  auto all = tracing_presets();
  ASSERT_EQ(all.size(), 10u);
  std::set<std::string> names;
  for (const auto& p : all) names.insert(p.name);
  for (const char* n : {"NONE", "SICK", "CON-2", "CON-5", "CON-10", "SICK+", "CON-2+", "CON-5+", "CON-10+", "SICK++"})
    EXPECT_TRUE(names.count(n)) << n;
  auto con10 = tracing_preset("CON-10");
  EXPECT_EQ(con10.tracing.horizon_days, 10);
  EXPECT_EQ(con10.testing.random_rate, 0.02);
  EXPECT_TRUE(con10.tracing.stay_home_if_sick);
  EXPECT_TRUE(con10.tracing.quarantine_contacts);
  EXPECT_EQ(tracing_preset("SICK++").testing.random_rate, 1.0);
  EXPECT_FALSE(tracing_preset("NONE").tracing.stay_home_if_sick);
  EXPECT_THROW(tracing_preset("CON-11"), ConfigError);
}

TEST(Registry, ZeroHorizonStaysEmpty) {
  ContactRegistry reg(0);
  for (int d = 0; d < 5; ++d) {
    reg.begin_day(d, 10);
    reg.record(Contact{1, 2});
    reg.end_day();
    EXPECT_TRUE(reg.empty());
    EXPECT_TRUE(reg.contacts_of(1).empty());
  }
}

TEST(Registry, CountsRepeatMeetings) {
  ContactRegistry reg(3);
  reg.begin_day(0, 10);
  reg.record(Contact{1, 2});
  reg.record(Contact{1, 2});
  reg.record(Contact{2, 5});
  reg.end_day();
  EXPECT_EQ(reg.count({1, 2}, 0), 2);
  EXPECT_EQ(reg.count({2, 5}, 0), 1);
  EXPECT_EQ(reg.count({1, 5}, 0), 0);
  EXPECT_EQ(reg.contacts_of(2), (std::vector<PersonId>{1, 5}));
}

TEST(Registry, EvictsAtTheHorizon) {
  const int n = 4;
  ContactRegistry reg(n);
  for (int d = 0; d < 20; ++d) {
    reg.begin_day(d, 10);
    reg.record(Contact{0, static_cast<PersonId>(1 + d % 9)});
    reg.end_day();
    ASSERT_TRUE(reg.oldest_day().has_value());
    EXPECT_GT(*reg.oldest_day(), d - n);
    EXPECT_LE(reg.days_held(), static_cast<std::size_t>(n));
  }
  // day 16..19 remain; day 15 was evicted when day 19 opened
  EXPECT_EQ(reg.count({0, static_cast<PersonId>(1 + 15 % 9)}, 15), 0);
  EXPECT_EQ(reg.count({0, static_cast<PersonId>(1 + 16 % 9)}, 16), 1);
}

namespace {

World small_world() {
  auto cfg = PopulationConfig::town_1k();
  SeededRng rng(3);
  return build_population(cfg, rng);
}

}  // namespace

TEST(Quarantine, ContactsPlusHouseholds) {
  World w = small_world();
  const PersonId index = 0;
  // pick two people from other households
  PersonId a = 0, b = 0;
  for (PersonId p = 1; p < static_cast<PersonId>(w.persons.size()); ++p) {
    if (w.household_of[p] == w.household_of[index]) continue;
    if (a == 0) {
      a = p;
    } else if (w.household_of[p] != w.household_of[a]) {
      b = p;
      break;
    }
  }
  ContactRegistry reg(5);
  reg.begin_day(0, w.persons.size());
  reg.record(Contact{std::min(index, a), std::max(index, a)});
  reg.record(Contact{std::min(index, b), std::max(index, b)});
  reg.end_day();
  auto q = quarantine_first_order(reg, index, w);
  std::set<PersonId> expected;
  for (PersonId c : {a, b})
    for (PersonId m : w.households[w.household_of[c]].members) expected.insert(m);
  expected.erase(index);
  EXPECT_EQ(std::set<PersonId>(q.begin(), q.end()), expected);
  EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));
  // closed under household membership
  std::set<PersonId> qs(q.begin(), q.end());
  for (PersonId p : q)
    for (PersonId m : w.households[w.household_of[p]].members)
      if (m != index) { EXPECT_TRUE(qs.count(m)); }

  ContactRegistry none(0);
  none.begin_day(0, w.persons.size());
  none.record(Contact{std::min(index, a), std::max(index, a)});
  none.end_day();
  EXPECT_TRUE(quarantine_first_order(none, index, w).empty());
}

TEST(Testing, CriticalAndDeadAlwaysPositive) {
  World w = small_world();
  w.persons[1].disease.compartment = Compartment::hospitalized;
  w.persons[2].disease.compartment = Compartment::needs_hospital;
  w.persons[3].disease.compartment = Compartment::dead;
  TestingConfig cfg;
  cfg.random_rate = cfg.symptomatic_rate = cfg.retest_positive_rate = 0;
  std::deque<PendingResult> pending;
  SeededRng rng(1);
  run_testing(w, cfg, 0, pending, rng);
  EXPECT_EQ(w.persons[1].test_status, TestStatus::positive);
  EXPECT_EQ(w.persons[2].test_status, TestStatus::positive);
  EXPECT_EQ(w.persons[3].test_status, TestStatus::positive);
  auto s = perceived_summary(w);
  EXPECT_EQ(s.critical, 2);
  EXPECT_EQ(s.dead, 1);
  EXPECT_EQ(s.infected, 2);
}

TEST(Testing, NothingSelectedChangesNothing) {
  World w = small_world();
  TestingConfig cfg;
  cfg.random_rate = cfg.symptomatic_rate = cfg.retest_positive_rate = 0;
  std::deque<PendingResult> pending;
  SeededRng rng(1);
  const auto before = perceived_summary(w);
  auto results = run_testing(w, cfg, 0, pending, rng);
  EXPECT_TRUE(results.empty());
  EXPECT_EQ(perceived_summary(w), before);
}

TEST(Testing, FalsePositiveRate) {
  World w = small_world();
  TestingConfig cfg;
  cfg.random_rate = 1.0;
  cfg.false_positive = 0.001;
  SeededRng rng(2);
  std::deque<PendingResult> pending;
  long positives = 0, tests = 0;
  for (int day = 0; day < 200; ++day) {
    for (auto& p : w.persons) p.test_status = TestStatus::untested;
    for (const auto& r : run_testing(w, cfg, day, pending, rng)) {
      ++tests;
      positives += r.positive;
    }
  }
  EXPECT_EQ(tests, 200L * 1000);
  EXPECT_NEAR(static_cast<double>(positives) / tests, 0.001, 0.0003);
}

TEST(Testing, FalseNegativeRate) {
  World w = small_world();
  for (auto& p : w.persons) p.disease.compartment = Compartment::asymptomatic;
  TestingConfig cfg;
  cfg.random_rate = 1.0;
  cfg.false_negative = 0.01;
  SeededRng rng(3);
  std::deque<PendingResult> pending;
  long negatives = 0, tests = 0;
  for (int day = 0; day < 50; ++day) {
    for (auto& p : w.persons) p.test_status = TestStatus::untested;
    for (const auto& r : run_testing(w, cfg, day, pending, rng)) {
      ++tests;
      negatives += !r.positive;
    }
  }
  EXPECT_NEAR(static_cast<double>(negatives) / tests, 0.01, 0.002);
}

TEST(Testing, DelayedResultsArriveLater) {
  World w = small_world();
  w.persons[5].disease.compartment = Compartment::symptomatic;
  TestingConfig cfg;
  cfg.random_rate = 0;
  cfg.symptomatic_rate = 1.0;
  cfg.false_negative = 0;
  cfg.result_delay_days = 2;
  std::deque<PendingResult> pending;
  SeededRng rng(4);
  run_testing(w, cfg, 0, pending, rng);
  EXPECT_NE(w.persons[5].test_status, TestStatus::positive);
  run_testing(w, cfg, 1, pending, rng);
  EXPECT_NE(w.persons[5].test_status, TestStatus::positive);
  run_testing(w, cfg, 2, pending, rng);
  EXPECT_EQ(w.persons[5].test_status, TestStatus::positive);
}

TEST(Testing, ConfigValidation) {
  TestingConfig t;
  EXPECT_NO_THROW(t.validate());
  t.random_rate = 1.2;
  EXPECT_THROW(t.validate(), ConfigError);
  TracingConfig tr;
  tr.horizon_days = -1;
  EXPECT_THROW(tr.validate(), ConfigError);
}
