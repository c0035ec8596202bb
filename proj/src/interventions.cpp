#include "pansim/interventions.hpp"

#include <algorithm>

namespace pansim {

StageTableKind stage_table_kind_from_string(std::string_view name) {
  if (name == "five-stage" || name == "five_stage" || name == "default") {
    return StageTableKind::five_stage;
  }
  if (name == "SWE" || name == "swe" || name == "swedish") return StageTableKind::swedish;
  if (name == "ITA" || name == "ita" || name == "italian") return StageTableKind::italian;
  throw ConfigError("unknown stage table '" + std::string(name) + "'");
}

std::string_view to_string(StageTableKind kind) {
  switch (kind) {
    case StageTableKind::five_stage: return "five-stage";
    case StageTableKind::swedish: return "SWE";
    case StageTableKind::italian: return "ITA";
  }
  return "?";
}

namespace {

Regulation stage(int s, bool sick_hygiene, bool masks, double beta, GatheringLimit limit,
                 KindSet locked) {
  Regulation r;
  r.stage = s;
  r.stay_home_if_sick = sick_hygiene;
  r.practice_good_hygiene = sick_hygiene;
  r.wear_facial_coverings = masks;
  r.social_distancing = beta;
  r.gathering_limit = limit;
  r.locked_kinds = locked;
  return r;
}

using K = LocationKind;

}  // namespace

std::vector<Regulation> stage_table(StageTableKind kind) {
  switch (kind) {
    case StageTableKind::five_stage:
      return {
          stage(0, false, false, 0.0, {}, {}),
          stage(1, true, false, 0.0, {50, 25}, {}),
          stage(2, true, true, 0.3, {25, 10}, {K::school, K::hair_salon}),
          stage(3, true, true, 0.5, {0, 0}, {K::school, K::hair_salon}),
          stage(4, true, true, 0.7, {0, 0}, {K::school, K::hair_salon, K::office, K::retail}),
      };
    case StageTableKind::swedish:
      return {
          stage(0, false, false, 0.0, {}, {}),
          stage(1, true, false, 0.7, {50, 50}, {}),
      };
    case StageTableKind::italian:
      return {
          stage(0, false, false, 0.0, {}, {}),
          stage(1, true, false, 0.2, {}, {}),
          stage(2, true, false, 0.25, {}, {K::school}),
          stage(3, true, true, 0.6, {0, 0}, {K::school, K::hair_salon, K::retail}),
          stage(4, true, true, 0.8, {0, 0}, {K::office, K::school, K::hair_salon, K::retail}),
      };
  }
  throw ConfigError("unknown stage table");
}

std::vector<Regulation> stage_table(std::string_view name) {
  return stage_table(stage_table_kind_from_string(name));
}

ContactRates effective_contact_rates(const ContactRates& base, const Regulation& regulation) {
  const double keep = 1.0 - regulation.social_distancing;
  return {base.worker_worker * keep, base.worker_visitor * keep, base.visitor_visitor * keep};
}

double transmission_multiplier(const Regulation& regulation, bool complied) {
  if (!complied) return 1.0;
  double m = 1.0;
  if (regulation.wear_facial_coverings) m *= kMaskMultiplier;
  if (regulation.practice_good_hygiene) m *= kHygieneMultiplier;
  return m;
}

namespace {
void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
}
}  // namespace

void TestingConfig::validate() const {
  check_unit(random_rate, "testing.random_rate");
  check_unit(symptomatic_rate, "testing.symptomatic_rate");
  check_unit(critical_rate, "testing.critical_rate");
  check_unit(false_positive, "testing.false_positive");
  check_unit(false_negative, "testing.false_negative");
  check_unit(retest_positive_rate, "testing.retest_positive_rate");
  if (result_delay_days < 0) throw ConfigError("testing.result_delay_days must be >= 0");
}

void TracingConfig::validate() const {
  if (horizon_days < 0) throw ConfigError("tracing.horizon_days must be >= 0");
  if (quarantine_days < 0) throw ConfigError("tracing.quarantine_days must be >= 0");
  check_unit(trace_miss_probability, "tracing.trace_miss_probability");
}

std::vector<TracingStrategy> tracing_presets() {
  auto make = [](std::string name, int horizon, double rate, bool sick, bool contacts) {
    TracingStrategy s;
    s.name = std::move(name);
    s.testing.random_rate = rate;
    s.testing.symptomatic_rate = std::max(s.testing.symptomatic_rate, rate);
    s.tracing.horizon_days = horizon;
    s.tracing.stay_home_if_sick = sick;
    s.tracing.quarantine_contacts = contacts;
    return s;
  };
  return {
      make("NONE", 0, 0.02, false, false),   make("SICK", 0, 0.02, true, false),
      make("CON-2", 2, 0.02, true, true),    make("CON-5", 5, 0.02, true, true),
      make("CON-10", 10, 0.02, true, true),  make("SICK+", 0, 0.3, true, false),
      make("CON-2+", 2, 0.3, true, true),    make("CON-5+", 5, 0.3, true, true),
      make("CON-10+", 10, 0.3, true, true),  make("SICK++", 0, 1.0, true, false),
  };
}

TracingStrategy tracing_preset(std::string_view name) {
  for (auto& s : tracing_presets())
    if (s.name == name) return s;
  throw ConfigError("unknown testing/tracing preset '" + std::string(name) + "'");
}

PerceivedSummary perceived_summary(const World& world) {
  PerceivedSummary s;
  for (const auto& p : world.persons) {
    const auto c = p.disease.compartment;
    if (c == Compartment::dead) {
      if (p.test_status == TestStatus::positive) ++s.dead;
      continue;
    }
    if (p.test_status == TestStatus::positive) {
      ++s.infected;
      if (is_critical(c)) ++s.critical;
    } else if (p.ever_positive && p.test_status == TestStatus::negative) {
      ++s.recovered;
    }
  }
  return s;
}

namespace {

// Returns true when the status flipped to positive.
bool apply_result(PersonState& p, bool positive) {
  if (positive) {
    bool fresh = p.test_status != TestStatus::positive;
    p.test_status = TestStatus::positive;
    p.ever_positive = true;
    return fresh;
  }
  p.test_status = TestStatus::negative;
  p.quarantined = false;
  p.quarantine_until = -1;
  return false;
}

}  // namespace

std::vector<TestResult> run_testing(World& world, const TestingConfig& cfg, int day,
                                    std::deque<PendingResult>& pending, SeededRng& rng) {
  std::vector<TestResult> results;
  auto emit = [&](PersonState& p, bool positive) {
    bool fresh = apply_result(p, positive);
    results.push_back({p.id, positive, fresh});
  };

  for (auto& p : world.persons) {
    const auto c = p.disease.compartment;
    if (c == Compartment::dead) {
      if (p.test_status != TestStatus::positive) emit(p, true);
      continue;
    }
    if (is_critical(c)) {
      if (p.test_status == TestStatus::positive) continue;
      if (rng.bernoulli(cfg.critical_rate)) emit(p, true);
      continue;
    }
    double rate;
    if (p.test_status == TestStatus::positive)
      rate = cfg.retest_positive_rate;
    else if (c == Compartment::symptomatic)
      rate = cfg.symptomatic_rate;
    else
      rate = cfg.random_rate;
    if (p.quarantined) rate = std::max(rate, cfg.symptomatic_rate);
    if (!rng.bernoulli(rate)) continue;
    const bool truth = is_infected(c);
    const bool positive = truth ? !rng.bernoulli(cfg.false_negative)
                                : rng.bernoulli(cfg.false_positive);
    if (cfg.result_delay_days == 0)
      emit(p, positive);
    else
      pending.push_back({day + cfg.result_delay_days, p.id, positive});
  }

  while (!pending.empty() && pending.front().due_day <= day) {
    auto r = pending.front();
    pending.pop_front();
    auto& p = world.persons[r.person];
    if (p.disease.compartment == Compartment::dead) continue;
    emit(p, r.positive);
  }
  return results;
}

void ContactRegistry::begin_day(int day, std::size_t population) {
  (void)population;
  while (!days_.empty() && day - days_.front().day >= horizon_) days_.pop_front();
  if (horizon_ <= 0) return;
  Day d;
  d.day = day;
  days_.push_back(std::move(d));
}

void ContactRegistry::record(const Contact& c) {
  if (days_.empty() || days_.back().closed) return;
  days_.back().open.push_back(c);
}

void ContactRegistry::record(std::span<const Contact> contacts) {
  if (days_.empty() || days_.back().closed) return;
  auto& open = days_.back().open;
  open.insert(open.end(), contacts.begin(), contacts.end());
}

void ContactRegistry::end_day() {
  if (days_.empty() || days_.back().closed) return;
  Day& d = days_.back();
  std::sort(d.open.begin(), d.open.end());
  PersonId max_id = -1;
  for (std::size_t i = 0; i < d.open.size();) {
    std::size_t j = i;
    while (j < d.open.size() && d.open[j] == d.open[i]) ++j;
    d.counts.emplace_back(d.open[i], static_cast<int>(j - i));
    max_id = std::max({max_id, d.open[i].a, d.open[i].b});
    i = j;
  }
  d.open.clear();
  d.open.shrink_to_fit();

  const std::size_t n = static_cast<std::size_t>(max_id + 1);
  d.offsets.assign(n + 1, 0);
  for (const auto& [c, cnt] : d.counts) {
    ++d.offsets[c.a + 1];
    ++d.offsets[c.b + 1];
  }
  for (std::size_t i = 0; i < n; ++i) d.offsets[i + 1] += d.offsets[i];
  d.neighbors.resize(d.offsets[n]);
  std::vector<std::size_t> fill(d.offsets.begin(), d.offsets.end() - 1);
  for (const auto& [c, cnt] : d.counts) {
    d.neighbors[fill[c.a]++] = c.b;
    d.neighbors[fill[c.b]++] = c.a;
  }
  d.closed = true;
}

std::vector<PersonId> ContactRegistry::contacts_of(PersonId p) const {
  std::vector<PersonId> out;
  for (const auto& d : days_) {
    if (d.closed) {
      if (static_cast<std::size_t>(p) + 1 >= d.offsets.size()) continue;
      out.insert(out.end(), d.neighbors.begin() + static_cast<std::ptrdiff_t>(d.offsets[p]),
                 d.neighbors.begin() + static_cast<std::ptrdiff_t>(d.offsets[p + 1]));
    } else {
      for (const auto& c : d.open) {
        if (c.a == p) out.push_back(c.b);
        if (c.b == p) out.push_back(c.a);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int ContactRegistry::count(const Contact& c, int day) const {
  for (const auto& d : days_) {
    if (d.day != day) continue;
    if (!d.closed) return static_cast<int>(std::count(d.open.begin(), d.open.end(), c));
    auto it = std::lower_bound(d.counts.begin(), d.counts.end(), c,
                               [](const auto& e, const Contact& k) { return e.first < k; });
    return it != d.counts.end() && it->first == c ? it->second : 0;
  }
  return 0;
}

std::optional<int> ContactRegistry::oldest_day() const {
  if (days_.empty()) return std::nullopt;
  return days_.front().day;
}

bool ContactRegistry::empty() const {
  for (const auto& d : days_)
    if (!d.open.empty() || !d.counts.empty()) return false;
  return true;
}

std::vector<PersonId> quarantine_first_order(const ContactRegistry& registry, PersonId index,
                                             const World& world) {
  std::vector<PersonId> out;
  for (PersonId c : registry.contacts_of(index)) {
    out.push_back(c);
    int h = world.household_of.empty() ? -1 : world.household_of[c];
    if (h >= 0)
      for (PersonId m : world.households[h].members) out.push_back(m);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), index), out.end());
  return out;
}

}  // namespace pansim
