#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "pansim/disease.hpp"

using namespace pansim;
using C = Compartment;

TEST(Disease, EdgeSet) {
  EXPECT_TRUE(is_legal_transition(C::susceptible, C::exposed));
  EXPECT_TRUE(is_legal_transition(C::exposed, C::presymptomatic));
  EXPECT_TRUE(is_legal_transition(C::exposed, C::preasymptomatic));
  EXPECT_TRUE(is_legal_transition(C::symptomatic, C::needs_hospital));
  EXPECT_TRUE(is_legal_transition(C::hospitalized, C::dead));
  EXPECT_FALSE(is_legal_transition(C::susceptible, C::symptomatic));
  EXPECT_FALSE(is_legal_transition(C::asymptomatic, C::hospitalized));
  EXPECT_FALSE(is_legal_transition(C::recovered, C::susceptible));
  EXPECT_FALSE(is_legal_transition(C::dead, C::recovered));
}

TEST(Disease, AgeGroups) {
  EXPECT_EQ(age_group(0), 0);
  EXPECT_EQ(age_group(4), 0);
  EXPECT_EQ(age_group(5), 1);
  EXPECT_EQ(age_group(17), 1);
  EXPECT_EQ(age_group(18), 2);
  EXPECT_EQ(age_group(49), 2);
  EXPECT_EQ(age_group(50), 3);
  EXPECT_EQ(age_group(64), 3);
  EXPECT_EQ(age_group(65), 4);
}

TEST(Disease, DerivedRatesMatchClosedForm) {
  SeirParams p;
  for (int g = 0; g < 5; ++g) {
    for (RiskClass risk : {RiskClass::normal, RiskClass::high}) {
      const double yhr = (risk == RiskClass::high ? p.yhr_high_risk_pct : p.yhr_low_risk_pct)[g] / 100.0;
      const double gy = 1.0 / 4.0, eta = 0.1695;
      EXPECT_NEAR(p.pi(g, risk), gy * yhr / (eta + (gy - eta) * yhr), 1e-15);
      EXPECT_GE(p.pi(g, risk), 0.0);
      EXPECT_LE(p.pi(g, risk), 1.0);
    }
    const double hfr = p.hfr_pct[g] / 100.0;
    const double gh = 1.0 / ((9.4 + 10.7 + 12.8) / 3.0), mu = 1.0 / ((5.2 + 8.1 + 10.1) / 3.0);
    EXPECT_NEAR(p.nu(g), gh * hfr / (mu + (gh - mu) * hfr), 1e-15);
  }
}

TEST(Disease, DefaultsValidateAndBadValuesThrow) {
  SeirParams p;
  EXPECT_NO_THROW(p.validate());
  p.symptomatic_fraction = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = SeirParams{};
  p.latent_days = {3, 2, 1};
  EXPECT_THROW(p.validate(), ConfigError);
}

// Long random progressions only ever take edges of the machine and end
// absorbed in R or D.
TEST(Disease, ProgressionTakesLegalEdgesOnly) {
  SeirParams params;
  SeededRng rng(11);
  HospitalBeds beds;
  beds.add_ward(0, 3);
  std::set<std::pair<int, int>> seen;
  for (int person = 0; person < 3000; ++person) {
    PatientTraits traits{static_cast<int>(rng.below(5)), rng.bernoulli(0.3) ? RiskClass::high : RiskClass::normal};
    DiseaseState s = enter_compartment(C::exposed, traits, params, rng);
    LocationId ward = kNoLocation;
    for (int day = 0; day < 200; ++day) {
      const C before = s.compartment;
      Progression step = seir_daily_update(s, ward, traits, params, beds, rng);
      ASSERT_EQ(step.from, before);
      ASSERT_EQ(step.to, s.compartment);
      ASSERT_TRUE(is_legal_transition(step.from, step.to))
          << to_string(step.from) << " -> " << to_string(step.to);
      if (step.changed()) seen.insert({static_cast<int>(step.from), static_cast<int>(step.to)});
      ASSERT_EQ(ward != kNoLocation, s.compartment == C::hospitalized);
      if (s.compartment == C::recovered || s.compartment == C::dead) break;
    }
    ASSERT_TRUE(s.compartment == C::recovered || s.compartment == C::dead);
    ASSERT_LE(beds.occupied(), beds.capacity());
  }
  EXPECT_EQ(beds.occupied(), 0);
  // the common edges all occur
  EXPECT_TRUE(seen.count({int(C::exposed), int(C::presymptomatic)}));
  EXPECT_TRUE(seen.count({int(C::exposed), int(C::preasymptomatic)}));
  EXPECT_TRUE(seen.count({int(C::symptomatic), int(C::recovered)}));
  EXPECT_TRUE(seen.count({int(C::symptomatic), int(C::hospitalized)}));
  EXPECT_TRUE(seen.count({int(C::hospitalized), int(C::recovered)}));
}

TEST(Disease, SymptomaticFractionHolds) {
  SeirParams params;
  SeededRng rng(12);
  int pre_y = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    DiseaseState s = enter_compartment(C::exposed, {2, RiskClass::normal}, params, rng);
    ASSERT_TRUE(s.committed_next.has_value());
    pre_y += *s.committed_next == C::presymptomatic;
  }
  EXPECT_NEAR(static_cast<double>(pre_y) / n, 0.57, 0.015);
}

TEST(Disease, FullHospitalSendsPatientsToNeedsHospital) {
  SeirParams params;
  params.symptom_to_hospital_rate = 1.0;
  params.yhr_low_risk_pct = {100, 100, 100, 100, 100};
  SeededRng rng(13);
  HospitalBeds beds;  // no beds at all
  DiseaseState s = enter_compartment(C::symptomatic, {4, RiskClass::normal}, params, rng);
  LocationId ward = kNoLocation;
  for (int day = 0; day < 50 && s.compartment == C::symptomatic; ++day)
    seir_daily_update(s, ward, {4, RiskClass::normal}, params, beds, rng);
  EXPECT_EQ(s.compartment, C::needs_hospital);
  EXPECT_EQ(ward, kNoLocation);
}

TEST(Disease, SpreadRateIsBounded) {
  SeededRng rng(14);
  for (int i = 0; i < 10000; ++i) {
    const double a = draw_spread_rate(0.03, 0.5, rng);
    ASSERT_GE(a, 0.0);
    ASSERT_LE(a, 1.0);
  }
}

TEST(Disease, HourlySurvivalIsProduct) {
  std::vector<InfectiousContact> cs{{0.03, 1.0}, {0.05, 0.6}, {0.1, 0.48}};
  EXPECT_NEAR(hourly_survival(cs), (1 - 0.03) * (1 - 0.03) * (1 - 0.048), 1e-15);
  EXPECT_EQ(hourly_survival(std::span<const InfectiousContact>{}), 1.0);
  EXPECT_THROW(hourly_survival(C::recovered, cs), ContractViolation);
  EXPECT_NEAR(hourly_survival(C::susceptible, cs), hourly_survival(cs), 0.0);
  const std::vector<double> hours{0.9, 0.8, 1.0};
  EXPECT_NEAR(daily_infection_probability(hours), 1 - 0.72, 1e-15);
}

namespace {

std::vector<Contact> all_pairs(std::span<const PersonId> xs, std::span<const PersonId> ys, bool same) {
  std::vector<Contact> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = same ? i + 1 : 0; j < ys.size(); ++j)
      out.push_back({std::min(xs[i], ys[j]), std::max(xs[i], ys[j])});
  return out;
}

}  // namespace

TEST(Contacts, RateOneGivesCompleteGraphRateZeroNothing) {
  SeededRng rng(15);
  ContactScratch scratch;
  std::vector<PersonId> workers{1, 4, 7}, visitors{2, 3, 9, 12};
  std::vector<Contact> out;
  sample_contacts(workers, visitors, {1.0, 1.0, 1.0}, {}, rng, out, scratch);
  std::sort(out.begin(), out.end());
  auto expected = all_pairs(workers, workers, true);
  for (auto c : all_pairs(workers, visitors, false)) expected.push_back(c);
  for (auto c : all_pairs(visitors, visitors, true)) expected.push_back(c);
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(out, expected);

  out.clear();
  sample_contacts(workers, visitors, {0.0, 0.0, 0.0}, {3, 3, 3}, rng, out, scratch);
  EXPECT_TRUE(out.empty());
}

TEST(Contacts, PairsAreDistinctAndOrdered) {
  SeededRng rng(16);
  ContactScratch scratch;
  std::vector<PersonId> workers, visitors;
  for (PersonId p = 0; p < 20; ++p) workers.push_back(p);
  for (PersonId p = 20; p < 80; ++p) visitors.push_back(p);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<Contact> out;
    sample_contacts(workers, visitors, {0.3, 0.1, 0.05}, {2, 1, 1}, rng, out, scratch);
    std::set<Contact> unique(out.begin(), out.end());
    ASSERT_EQ(unique.size(), out.size());
    for (const auto& c : out) ASSERT_LT(c.a, c.b);
  }
}

TEST(Contacts, DegreeFloorsHold) {
  SeededRng rng(17);
  ContactScratch scratch;
  std::vector<PersonId> workers{0, 1, 2, 3, 4}, visitors{5, 6, 7, 8, 9, 10};
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<Contact> out;
    sample_contacts(workers, visitors, {0.001, 0.001, 0.001}, {2, 1, 1}, rng, out, scratch);
    std::vector<int> ww(11), wv(11), vv(11);
    auto is_worker = [](PersonId p) { return p <= 4; };
    for (const auto& c : out) {
      if (is_worker(c.a) && is_worker(c.b)) {
        ++ww[c.a];
        ++ww[c.b];
      } else if (!is_worker(c.a) && !is_worker(c.b)) {
        ++vv[c.a];
        ++vv[c.b];
      } else {
        ++wv[c.a];
        ++wv[c.b];
      }
    }
    // the cross-role floor is owed to visitors
    for (PersonId w : workers) ASSERT_GE(ww[w], 2);
    for (PersonId v : visitors) {
      ASSERT_GE(wv[v], 1);
      ASSERT_GE(vv[v], 1);
    }
  }
}

TEST(Contacts, EmpiricalRateMatchesBernoulli) {
  SeededRng rng(18);
  ContactScratch scratch;
  std::vector<PersonId> visitors;
  for (PersonId p = 0; p < 40; ++p) visitors.push_back(p);
  const double rate = 0.07;
  double total = 0;
  const int reps = 2000;
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<Contact> out;
    sample_contacts({}, visitors, {0, 0, rate}, {}, rng, out, scratch);
    total += static_cast<double>(out.size());
  }
  const double pairs = 40.0 * 39.0 / 2.0;
  EXPECT_NEAR(total / reps / pairs, rate, 0.002);
}

TEST(Ledger, MatchesDirectProduct) {
  ExposureLedger ledger;
  ledger.reset(4);
  std::vector<double> transmit{0.0, 0.03, 0.05, 0.0};
  std::vector<std::uint8_t> sus{1, 0, 0, 1};
  ledger.add_contact({0, 1}, transmit, sus);
  ledger.add_contact({0, 2}, transmit, sus);
  ledger.add_contact({1, 3}, transmit, sus);
  ledger.add_contact({0, 3}, transmit, sus);  // two susceptibles: nothing
  ledger.end_hour();
  ledger.add_contact({0, 2}, transmit, sus);
  ledger.end_hour();
  EXPECT_NEAR(ledger.infection_probability(0), 1 - 0.97 * 0.95 * 0.95, 1e-15);
  EXPECT_NEAR(ledger.infection_probability(3), 0.03, 1e-15);
  EXPECT_EQ(ledger.infection_probability(1), 0.0);
  EXPECT_EQ(ledger.infection_probability(2), 0.0);
}

TEST(Beds, AdmitAndDischarge) {
  HospitalBeds beds;
  beds.add_ward(5, 1);
  beds.add_ward(9, 1);
  EXPECT_EQ(beds.capacity(), 2);
  EXPECT_EQ(beds.admit(), std::optional<LocationId>(5));
  EXPECT_EQ(beds.admit(), std::optional<LocationId>(9));
  EXPECT_FALSE(beds.admit().has_value());
  EXPECT_FALSE(beds.has_free_bed());
  beds.discharge(5);
  EXPECT_EQ(beds.occupied(), 1);
  EXPECT_EQ(beds.admit(), std::optional<LocationId>(5));
}
