#include <gtest/gtest.h>

#include <map>

#include "pansim/world.hpp"

using namespace pansim;

namespace {

int count_kind(const World& w, LocationKind k) { return static_cast<int>(w.locations_of(k).size()); }

World town(std::uint64_t seed = 1, PopulationConfig cfg = PopulationConfig::town_1k()) {
  SeededRng rng(seed);
  return build_population(cfg, rng);
}

}  // namespace

TEST(World, OneThousandTownCounts) {
  World w = town();
  EXPECT_EQ(w.persons.size(), 1000u);
  EXPECT_EQ(count_kind(w, LocationKind::home), 300);
  EXPECT_EQ(count_kind(w, LocationKind::grocery), 4);
  EXPECT_EQ(count_kind(w, LocationKind::office), 5);
  EXPECT_EQ(count_kind(w, LocationKind::school), 1);
  EXPECT_EQ(count_kind(w, LocationKind::hospital), 1);
  EXPECT_EQ(count_kind(w, LocationKind::retail), 4);
  EXPECT_EQ(count_kind(w, LocationKind::hair_salon), 4);
  EXPECT_EQ(count_kind(w, LocationKind::cemetery), 1);
  EXPECT_EQ(w.beds.capacity(), 10);
}

TEST(World, RetireeHomesAreFifteenPercent) {
  World w = town();
  int retiree_only = 0;
  for (const auto& h : w.households) {
    ASSERT_FALSE(h.members.empty()) << "empty home";
    bool all = true;
    for (PersonId p : h.members) all &= w.persons[p].category == AgeCategory::retiree;
    retiree_only += all;
  }
  EXPECT_EQ(static_cast<int>(w.households.size()), 300);
  EXPECT_EQ(retiree_only, 45);
}

TEST(World, EveryoneHasTheRightAssignments) {
  World w = town(3);
  for (const auto& p : w.persons) {
    ASSERT_NE(p.home, kNoLocation);
    EXPECT_EQ(w.households[w.household_of[p.id]].home, p.home);
    switch (p.category) {
      case AgeCategory::minor:
        ASSERT_TRUE(p.work_or_school.has_value());
        EXPECT_EQ(w.locations[*p.work_or_school].kind, LocationKind::school);
        break;
      case AgeCategory::working_adult: {
        ASSERT_TRUE(p.work_or_school.has_value());
        const auto k = w.locations[*p.work_or_school].kind;
        EXPECT_NE(k, LocationKind::home);
        EXPECT_NE(k, LocationKind::cemetery);
        break;
      }
      case AgeCategory::retiree:
        EXPECT_FALSE(p.work_or_school.has_value());
        break;
    }
    if (p.category != AgeCategory::minor) {
      EXPECT_EQ(w.locations[p.favorites.grocery].kind, LocationKind::grocery);
      EXPECT_EQ(w.locations[p.favorites.retail].kind, LocationKind::retail);
      EXPECT_EQ(w.locations[p.favorites.hair_salon].kind, LocationKind::hair_salon);
    }
    if (p.age >= 65) { EXPECT_EQ(p.risk, RiskClass::high); }
  }
}

TEST(World, WorkerCapacitiesRespected) {
  World w = town(4);
  std::map<LocationId, int> staff;
  for (const auto& p : w.persons)
    if (p.category == AgeCategory::working_adult) ++staff[*p.work_or_school];
  for (auto [loc, n] : staff) EXPECT_LE(n, w.locations[loc].capacity.worker);
  // every hospital, school and store has staff
  for (LocationKind k : {LocationKind::hospital, LocationKind::school, LocationKind::grocery, LocationKind::retail})
    for (LocationId id : w.locations_of(k)) EXPECT_GT(staff[id], 0) << to_string(k);
}

TEST(World, DeterministicGivenSeed) {
  EXPECT_TRUE(town(9) == town(9));
  EXPECT_FALSE(town(9) == town(10));
}

TEST(World, DeficitNamesTheProblem) {
  auto cfg = PopulationConfig::town_1k();
  cfg.find(LocationKind::office)->count = 0;
  cfg.find(LocationKind::grocery)->capacity.worker = 1;
  cfg.find(LocationKind::retail)->capacity.worker = 1;
  SeededRng rng(1);
  try {
    build_population(cfg, rng);
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("worker"), std::string::npos) << e.what();
  }
}

TEST(World, TenThousandTownBuilds) {
  World w = town(2, PopulationConfig::town_10k());
  EXPECT_EQ(w.persons.size(), 10000u);
  EXPECT_GT(w.beds.capacity(), 10);
}

TEST(World, OpenHours) {
  OpenHours h = OpenHours::daily({0, 1, 2, 3, 4}, 9, 17);
  EXPECT_TRUE(h.is_open(0, 9));
  EXPECT_TRUE(h.is_open(4, 16));
  EXPECT_FALSE(h.is_open(4, 17));
  EXPECT_FALSE(h.is_open(5, 12));
  EXPECT_TRUE(OpenHours::always().is_open(6, 3));
}

TEST(World, HourPlansAreDeterministicAndSensible) {
  World w = town(5);
  Regulation open_reg;
  std::vector<int> event_of(w.persons.size(), -1);
  std::vector<int> visitors_a(w.locations.size()), visitors_b(w.locations.size());
  SeededRng ra(77), rb(77);
  Calendar cal{0, 10};  // Monday 10:00
  HourContext ca{&open_reg, event_of, {}, visitors_a};
  HourContext cb{&open_reg, event_of, {}, visitors_b};
  int at_work = 0;
  for (const auto& p : w.persons) {
    Placement a = plan_person_hour(w, p, cal, ca, ra);
    Placement b = plan_person_hour(w, p, cal, cb, rb);
    ASSERT_EQ(a.location, b.location);
    ASSERT_EQ(a.role, b.role);
    if (p.category == AgeCategory::working_adult && a.location == *p.work_or_school) ++at_work;
    if (p.category == AgeCategory::retiree && a.role == Role::worker) { EXPECT_EQ(a.location, p.home); }
  }
  EXPECT_GT(at_work, 100);
  EXPECT_EQ(ra, rb);
}

TEST(World, ClosedLocationsSendPeopleHome) {
  World w = town(6);
  Regulation reg;
  std::vector<int> event_of(w.persons.size(), -1);
  std::vector<int> visitors(w.locations.size());
  HourContext ctx{&reg, event_of, {}, visitors};
  SeededRng rng(1);
  Calendar night{0, 3};
  for (const auto& p : w.persons) {
    Placement pl = plan_person_hour(w, p, night, ctx, rng);
    const auto k = w.locations[pl.location].kind;
    EXPECT_TRUE(k == LocationKind::home || k == LocationKind::hospital) << to_string(k);
  }
}

TEST(World, SnapshotHasNoHealthState) {
  World w = town(7);
  const std::string s = world_snapshot_json(w);
  EXPECT_NE(s.find("locations"), std::string::npos);
  EXPECT_EQ(s.find("compartment"), std::string::npos);
}
