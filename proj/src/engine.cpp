#include "pansim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace pansim {

void SimConfig::validate() const {
  validate_population(population);
  seir.validate();
  testing.validate();
  tracing.validate();
  if (seed_cohort < 0) throw ConfigError("seed_cohort must be >= 0");
  if (activation_threshold < 0) throw ConfigError("activation_threshold must be >= 0");
  if (reward.c_max > 0.0) reward.validate();
}

int DayRecord::infected() const {
  int n = 0;
  for (int c = 0; c < kCompartmentCount; ++c)
    if (is_infected(static_cast<Compartment>(c))) n += true_summary[c];
  return n;
}

Simulation::Simulation(const SimConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed), rng_(seed), registry_(config.tracing.horizon_days) {
  config_.validate();
  world_ = build_population(config_.population, rng_);
  table_ = stage_table(config_.stage_table);
  regulation_ = table_.front();
  if (config_.tracing.stay_home_if_sick) regulation_.stay_home_if_sick = true;
  reward_ = config_.reward;
  if (reward_.c_max <= 0.0) reward_.c_max = world_.beds.capacity();
  reward_.max_stage = std::max(1, max_stage());

  // Seed the exposed cohort.
  std::vector<PersonId> ids(world_.persons.size());
  std::iota(ids.begin(), ids.end(), 0);
  const std::size_t cohort = std::min<std::size_t>(config_.seed_cohort, ids.size());
  for (std::size_t i = 0; i < cohort; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng_.below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  std::sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(cohort));
  for (std::size_t i = 0; i < cohort; ++i) {
    auto& p = world_.persons[ids[i]];
    p.disease = enter_compartment(Compartment::exposed, p.traits(), config_.seir, rng_);
  }
}

std::unique_ptr<Simulation> reset(const SimConfig& config, std::uint64_t seed) {
  return std::make_unique<Simulation>(config, seed);
}

CompartmentCounts Simulation::true_summary() const {
  CompartmentCounts counts{};
  for (const auto& p : world_.persons) ++counts[static_cast<int>(p.disease.compartment)];
  return counts;
}

bool Simulation::same_state(const Simulation& other) const {
  return world_ == other.world_ && calendar_ == other.calendar_ &&
         regulation_ == other.regulation_ && rng_ == other.rng_ &&
         records_.size() == other.records_.size();
}

const DayRecord& Simulation::step_day(int stage) {
  stage = std::clamp(stage, 0, max_stage());
  return step_day(table_[stage]);
}

const DayRecord& Simulation::step_day(const Regulation& regulation) {
  const int prev_stage = records_.empty() ? 0 : records_.back().stage;
  regulation_ = regulation;
  if (config_.tracing.stay_home_if_sick) regulation_.stay_home_if_sick = true;
  if (auto cap = config_.gathering_limit_override) {
    auto tighten = [&](std::optional<int>& limit) { limit = limit ? std::min(*limit, *cap) : *cap; };
    tighten(regulation_.gathering_limit.normal);
    tighten(regulation_.gathering_limit.high);
  }
  const int day = calendar_.day;

  for (auto& p : world_.persons) {
    if (p.quarantined && p.quarantine_until >= 0 && day >= p.quarantine_until) {
      p.quarantined = false;
      p.quarantine_until = -1;
    }
  }
  registry_.begin_day(day, world_.persons.size());

  std::int64_t contacts = 0;
  run_hours(contacts);
  end_of_day();

  DayRecord r;
  r.day = day;
  r.stage = regulation_.stage;
  r.true_summary = true_summary();
  r.perceived = perceived_summary(world_);
  r.n_critical = r.true_summary[static_cast<int>(Compartment::hospitalized)] +
                 r.true_summary[static_cast<int>(Compartment::needs_hospital)];
  r.hospital_occupancy = world_.beds.occupied();
  r.reward = reward_terms(r.n_critical, r.stage, prev_stage, reward_);
  r.contacts = contacts;
  records_.push_back(r);
  return records_.back();
}

void Simulation::run_hours(std::int64_t& contacts) {
  const std::size_t n = world_.persons.size();
  const std::size_t n_loc = world_.locations.size();
  ledger_.reset(n);
  transmit_.assign(n, 0.0);
  susceptible_.assign(n, 0);
  visitor_count_.assign(n_loc, 0);
  event_of_.assign(n, -1);
  for (auto& l : world_.locations) l.locked = regulation_.locked_kinds.contains(l.kind);
  if (config_.log_contacts) day_pairs_.clear();

  // Hour 0: regulation applied, today's gatherings scheduled.
  events_ = schedule_social_events(world_, calendar_, regulation_, rng_);
  for (std::size_t e = 0; e < events_.size(); ++e)
    for (PersonId g : events_[e].guests) event_of_[g] = static_cast<int>(e);

  for (std::size_t i = 0; i < n; ++i)
    susceptible_[i] = world_.persons[i].disease.compartment == Compartment::susceptible;

  HourContext ctx;
  ctx.regulation = &regulation_;
  ctx.event_of = event_of_;
  ctx.events = events_;
  ctx.visitor_count = visitor_count_;

  for (int hour = 0; hour < 24; ++hour) {
    calendar_.hour = hour;
    occupancy_.clear(n_loc);
    std::fill(visitor_count_.begin(), visitor_count_.end(), 0);

    for (const auto& p : world_.persons) {
      const auto c = p.disease.compartment;
      Placement at;
      if (c == Compartment::dead) {
        at = {world_.cemetery, Role::visitor, true};
      } else if (c == Compartment::hospitalized) {
        at = {p.ward, Role::patient, true};
      } else {
        at = plan_person_hour(world_, p, calendar_, ctx, rng_);
      }
      occupancy_.add(at.location, at.role, p.id);
      transmit_[p.id] =
          is_infectious(c) ? p.spread_rate * transmission_multiplier(regulation_, at.complied)
                           : 0.0;
    }

    for (const auto& loc : world_.locations) {
      auto workers = occupancy_.occupants(loc.id, Role::worker);
      std::span<const PersonId> visitors = occupancy_.occupants(loc.id, Role::visitor);
      auto patients = occupancy_.occupants(loc.id, Role::patient);
      if (!patients.empty()) {
        // Patients mix with staff through the visitor components.
        merged_.clear();
        std::merge(visitors.begin(), visitors.end(), patients.begin(), patients.end(),
                   std::back_inserter(merged_));
        visitors = merged_;
      }
      if (workers.size() + visitors.size() < 2) continue;
      const ContactRates rates = effective_contact_rates(loc.contact_rates, regulation_);
      hour_pairs_.clear();
      sample_contacts(workers, visitors, rates, loc.min_contacts, rng_, hour_pairs_,
                      contact_scratch_);
      contacts += static_cast<std::int64_t>(hour_pairs_.size());
      for (const auto& c : hour_pairs_) ledger_.add_contact(c, transmit_, susceptible_);
      if (registry_.horizon_days() > 0) registry_.record(hour_pairs_);
      if (config_.log_contacts) day_pairs_.insert(day_pairs_.end(), hour_pairs_.begin(),
                                                  hour_pairs_.end());
    }
    ledger_.end_hour();
  }
  calendar_.hour = 0;

  if (config_.log_contacts) {
    std::sort(day_pairs_.begin(), day_pairs_.end());
    day_pairs_.erase(std::unique(day_pairs_.begin(), day_pairs_.end()), day_pairs_.end());
    contact_log_.push_back({calendar_.day, day_pairs_});
  }
  registry_.end_day();
}

void Simulation::end_of_day() {
  const int day = calendar_.day;
  // Transmission resolution. susceptible_ still holds this morning's flags.
  for (auto& p : world_.persons) {
    if (p.disease.compartment != Compartment::susceptible) continue;
    const double prob = ledger_.infection_probability(p.id);
    if (prob > 0.0 && rng_.bernoulli(prob))
      p.disease = enter_compartment(Compartment::exposed, p.traits(), config_.seir, rng_);
  }
  // Progression, in id order. Persons exposed today start counting latent
  // days tomorrow, like every other compartment entry.
  for (auto& p : world_.persons) {
    if (susceptible_[p.id]) continue;
    seir_daily_update(p.disease, p.ward, p.traits(), config_.seir, world_.beds, rng_);
  }

  auto results = run_testing(world_, config_.testing, day, pending_tests_, rng_);

  if (config_.tracing.quarantine_contacts && registry_.horizon_days() > 0) {
    for (const auto& r : results) {
      if (!r.new_positive) continue;
      for (PersonId q : quarantine_first_order(registry_, r.person, world_)) {
        if (config_.tracing.trace_miss_probability > 0.0 &&
            rng_.bernoulli(config_.tracing.trace_miss_probability))
          continue;
        auto& p = world_.persons[q];
        if (p.disease.compartment == Compartment::dead) continue;
        p.quarantined = true;
        p.quarantine_until = std::max(p.quarantine_until, day + 1 + config_.tracing.quarantine_days);
      }
    }
  }
  ++calendar_.day;
}

PolicyObservation observe(const Simulation& sim) {
  PolicyObservation o;
  o.day = sim.calendar().day;
  o.stage = sim.stage();
  o.max_stage = sim.max_stage();
  o.perceived = sim.perceived();
  o.population = static_cast<int>(sim.world().persons.size());
  o.hospital_capacity = sim.world().beds.capacity();
  return o;
}

double Trajectory::total_reward() const {
  double sum = 0.0;
  for (const auto& r : records) sum += r.reward.total();
  return sum;
}

Trajectory run(const SimConfig& config, StagePolicy& policy, int horizon_days,
               std::uint64_t seed) {
  if (horizon_days < 1) throw ConfigError("horizon_days must be >= 1");
  SimConfig cfg = config;
  cfg.stage_table = policy.stage_table();
  Simulation sim(cfg, seed);
  policy.reset();
  Trajectory t;
  t.seed = seed;
  t.policy = policy.name();
  const int period = std::max(1, policy.action_period_days());
  int stage = 0;
  int next_decision = -1;
  for (int d = 0; d < horizon_days; ++d) {
    if (t.activation_day < 0 && sim.perceived().infected >= cfg.activation_threshold) {
      t.activation_day = d;
      next_decision = d;
    }
    if (t.activation_day >= 0 && d == next_decision) {
      int wanted = policy.decide(observe(sim));
      if (wanted < 0 || wanted > sim.max_stage()) {
        t.warnings.push_back("day " + std::to_string(d) + ": policy " + policy.name() +
                             " requested stage " + std::to_string(wanted) + ", clamped");
        wanted = std::clamp(wanted, 0, sim.max_stage());
      }
      stage = wanted;
      next_decision = d + period;
    }
    sim.step_day(stage);
  }
  t.records = sim.records();
  t.contact_log = sim.contact_log();
  return t;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string day_csv_row(const DayRecord& r) {
  std::string s = std::to_string(r.day) + "," + std::to_string(r.stage);
  for (int c : r.true_summary) s += "," + std::to_string(c);
  s += "," + std::to_string(r.perceived.infected) + "," + std::to_string(r.perceived.critical) +
       "," + std::to_string(r.perceived.dead) + "," + std::to_string(r.n_critical);
  s += "," + format_number(r.reward.total()) + "," + format_number(r.reward.health) + "," +
       format_number(r.reward.economic) + "," + format_number(r.reward.shaping);
  s += "," + std::to_string(r.contacts);
  return s;
}

void write_trajectory_csv(std::ostream& out, const std::vector<DayRecord>& records,
                          const std::string& metadata) {
  out << "# " << metadata << '\n' << kDayCsvHeader << '\n';
  for (const auto& r : records) out << day_csv_row(r) << '\n';
}

}  // namespace pansim
