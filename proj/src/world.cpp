#include "pansim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pansim/regulation.hpp"

namespace pansim {

std::string_view to_string(LocationKind kind) {
  switch (kind) {
    case LocationKind::home: return "home";
    case LocationKind::grocery: return "grocery";
    case LocationKind::office: return "office";
    case LocationKind::school: return "school";
    case LocationKind::hospital: return "hospital";
    case LocationKind::retail: return "retail";
    case LocationKind::hair_salon: return "hair_salon";
    case LocationKind::cemetery: return "cemetery";
  }
  return "?";
}

LocationKind location_kind_from_string(std::string_view name) {
  for (int k = 0; k < kLocationKindCount; ++k) {
    auto kind = static_cast<LocationKind>(k);
    if (to_string(kind) == name) return kind;
  }
  if (name == "salon" || name == "hair-salon") return LocationKind::hair_salon;
  throw ConfigError("unknown location kind '" + std::string(name) + "'");
}

OpenHours OpenHours::always() {
  OpenHours h;
  h.mask_.fill(0x00FFFFFFu);
  return h;
}

OpenHours OpenHours::daily(std::initializer_list<int> weekdays, int start, int end) {
  OpenHours h;
  for (int d : weekdays)
    for (int hour = start; hour < end; ++hour) h.set(d, hour, true);
  return h;
}

void OpenHours::set(int weekday, int hour, bool open) {
  if (open)
    mask_[weekday] |= (1u << hour);
  else
    mask_[weekday] &= ~(1u << hour);
}

const LocationTypeConfig* PopulationConfig::find(LocationKind kind) const {
  for (const auto& l : locations)
    if (l.kind == kind) return &l;
  return nullptr;
}

LocationTypeConfig* PopulationConfig::find(LocationKind kind) {
  for (auto& l : locations)
    if (l.kind == kind) return &l;
  return nullptr;
}

std::vector<AgeBucket> PopulationConfig::us_age_histogram() {
  return {{0, 4, 0.06}, {5, 17, 0.16}, {18, 49, 0.43}, {50, 64, 0.19}, {65, 90, 0.16}};
}

namespace {

constexpr int kUnlimited = -1;

LocationTypeConfig venue(LocationKind kind, int count, RoleCapacity cap, ContactRates rates,
                         MinContacts floors, OpenHours hours, int shift_start = 9,
                         int shift_end = 17) {
  LocationTypeConfig c;
  c.kind = kind;
  c.count = count;
  c.capacity = cap;
  c.contact_rates = rates;
  c.min_contacts = floors;
  c.open_hours = hours;
  c.shift_start = shift_start;
  c.shift_end = shift_end;
  return c;
}

struct TownCounts {
  int homes, groceries, grocery_workers, offices, schools, school_students, hospital_workers,
      beds, retail, retail_workers, salons;
};

PopulationConfig make_town(int size, const TownCounts& n) {
  const auto everyday = {0, 1, 2, 3, 4, 5, 6};
  const auto weekdays = {0, 1, 2, 3, 4};
  PopulationConfig c;
  c.size = size;
  c.age_histogram = PopulationConfig::us_age_histogram();
  c.locations = {
      venue(LocationKind::home, n.homes, {kUnlimited, kUnlimited, 0}, {0.5, 0.3, 0.3}, {0, 1, 0},
            OpenHours::always()),
      venue(LocationKind::grocery, n.groceries, {n.grocery_workers, 30, 0}, {0.2, 0.25, 0.3},
            {0, 1, 0}, OpenHours::daily(everyday, 8, 21)),
      venue(LocationKind::office, n.offices, {200, 0, 0}, {0.1, 0.01, 0.01}, {2, 1, 0},
            OpenHours::daily(weekdays, 9, 17)),
      venue(LocationKind::school, n.schools, {40, n.school_students, 0}, {0.1, 0.0, 0.1},
            {5, 1, 0}, OpenHours::daily(weekdays, 8, 16), 8, 16),
      venue(LocationKind::hospital, 1, {n.hospital_workers, 0, n.beds}, {0.1, 0.0, 0.0},
            {0, 3, 1}, OpenHours::always()),
      venue(LocationKind::retail, n.retail, {n.retail_workers, 30, 0}, {0.2, 0.25, 0.3},
            {0, 1, 0}, OpenHours::daily(everyday, 9, 21)),
      venue(LocationKind::hair_salon, n.salons, {3, 5, 0}, {0.5, 0.3, 0.1}, {1, 1, 0},
            OpenHours::daily({0, 1, 2, 3, 4, 5}, 9, 18)),
      venue(LocationKind::cemetery, 1, {0, kUnlimited, 0}, {0.0, 0.0, 0.05}, {0, 0, 0},
            OpenHours::always()),
  };
  return c;
}

}  // namespace

PopulationConfig PopulationConfig::town_1k() {
  return make_town(1000, {300, 4, 5, 5, 1, 300, 30, 10, 4, 5, 4});
}

PopulationConfig PopulationConfig::town_10k() {
  // Three schools cannot seat 10k-town minors at 300 each; seats are raised
  // so the town builds.
  return make_town(10000, {3000, 10, 10, 50, 3, 750, 80, 100, 15, 10, 20});
}

namespace {

AgeCategory category_of(int age) {
  if (age < 18) return AgeCategory::minor;
  if (age < 65) return AgeCategory::working_adult;
  return AgeCategory::retiree;
}

// Largest-remainder apportionment of `total` over the histogram fractions.
std::vector<int> apportion(const std::vector<AgeBucket>& buckets, int total) {
  double sum = 0.0;
  for (const auto& b : buckets) sum += b.fraction;
  std::vector<int> counts(buckets.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    double exact = total * buckets[i].fraction / sum;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (int k = 0; assigned < total; ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

}  // namespace

void validate_population(const PopulationConfig& c) {
  if (c.size < 0) throw ConfigError("population.size must be >= 0");
  if (c.age_histogram.empty()) throw ConfigError("population.age_histogram is empty");
  for (const auto& b : c.age_histogram)
    if (b.min_age < 0 || b.max_age < b.min_age || b.fraction < 0.0)
      throw ConfigError("population.age_histogram has an invalid bucket");
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(c.retiree_home_fraction)) throw ConfigError("population.retiree_home_fraction");
  if (!unit(c.high_risk_fraction)) throw ConfigError("population.high_risk_fraction");
  if (!unit(c.compliance)) throw ConfigError("population.compliance");
  if (c.spread_rate_mean < 0.0 || c.spread_rate_sd < 0.0)
    throw ConfigError("population.spread_rate must be non-negative");
  for (const auto& l : c.locations) {
    const auto& r = l.contact_rates;
    if (!unit(r.worker_worker) || !unit(r.worker_visitor) || !unit(r.visitor_visitor))
      throw ConfigError("contact rates for " + std::string(to_string(l.kind)) +
                        " must lie in [0, 1]");
    if (l.count < 0) throw ConfigError("negative location count");
  }
  if (c.size > 0 && (!c.find(LocationKind::home) || c.find(LocationKind::home)->count == 0))
    throw ConfigError("population needs at least one home");
}

namespace {

ErrandSlot make_slot(const Location& place, int period, const PersonState& person,
                     const World& world, SeededRng& rng) {
  ErrandSlot slot;
  slot.period_days = period;
  const Location* job =
      person.category == AgeCategory::working_adult && person.work_or_school
          ? &world.locations[*person.work_or_school]
          : nullptr;
  std::vector<std::pair<int, int>> candidates;
  for (int d = 0; d < period; ++d) {
    int weekday = d % 7;
    for (int h = 0; h < 24; ++h) {
      if (!place.open_hours.is_open(weekday, h)) continue;
      if (job && weekday < 5 && h >= job->shift_start && h < job->shift_end) continue;
      candidates.emplace_back(d, h);
    }
  }
  if (candidates.empty()) return slot;
  auto [d, h] = candidates[rng.below(candidates.size())];
  slot.day_offset = d;
  slot.hour = h;
  return slot;
}

int event_interval(double per_month, SeededRng& rng) {
  // Uniform on [1, 2m-1] has mean m days.
  int mean = std::max(1, static_cast<int>(std::lround(30.0 / per_month)));
  return 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(2 * mean - 1)));
}

}  // namespace

World build_population(const PopulationConfig& config, SeededRng& rng) {
  validate_population(config);
  World w;
  w.config = config;

  // Locations, in configuration order.
  for (const auto& type : config.locations) {
    for (int i = 0; i < type.count; ++i) {
      Location loc;
      loc.id = static_cast<LocationId>(w.locations.size());
      loc.kind = type.kind;
      loc.open_hours = type.open_hours;
      loc.capacity = type.capacity;
      loc.contact_rates = type.contact_rates;
      loc.min_contacts = type.min_contacts;
      loc.shift_start = type.shift_start;
      loc.shift_end = type.shift_end;
      if (loc.kind == LocationKind::hospital) w.beds.add_ward(loc.id, loc.capacity.patient);
      w.by_kind[static_cast<int>(loc.kind)].push_back(loc.id);
      w.locations.push_back(loc);
    }
  }
  if (!w.locations_of(LocationKind::cemetery).empty())
    w.cemetery = w.locations_of(LocationKind::cemetery).front();
  if (config.size == 0) return w;
  if (w.cemetery == kNoLocation) throw ConfigError("population needs a cemetery");

  // Persons: exact quota per age bucket, then shuffled ids.
  std::vector<int> ages;
  auto counts = apportion(config.age_histogram, config.size);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const auto& bucket = config.age_histogram[b];
    for (int k = 0; k < counts[b]; ++k) {
      auto span = static_cast<std::uint64_t>(bucket.max_age - bucket.min_age + 1);
      ages.push_back(bucket.min_age + static_cast<int>(rng.below(span)));
    }
  }
  rng.shuffle(std::span<int>(ages));
  w.persons.resize(ages.size());
  for (std::size_t i = 0; i < ages.size(); ++i) {
    auto& p = w.persons[i];
    p.id = static_cast<PersonId>(i);
    p.age = ages[i];
    p.category = category_of(p.age);
    bool high = rng.bernoulli(config.high_risk_fraction);
    p.risk = (high || p.age >= 65) ? RiskClass::high : RiskClass::normal;
    p.compliance = config.compliance;
    p.spread_rate = draw_spread_rate(config.spread_rate_mean, config.spread_rate_sd, rng);
  }

  std::vector<PersonId> minors, adults, retirees;
  for (const auto& p : w.persons) {
    switch (p.category) {
      case AgeCategory::minor: minors.push_back(p.id); break;
      case AgeCategory::working_adult: adults.push_back(p.id); break;
      case AgeCategory::retiree: retirees.push_back(p.id); break;
    }
  }
  rng.shuffle(std::span<PersonId>(minors));
  rng.shuffle(std::span<PersonId>(adults));
  rng.shuffle(std::span<PersonId>(retirees));

  // Households.
  auto homes = w.locations_of(LocationKind::home);
  const int n_homes = static_cast<int>(homes.size());
  int retiree_homes =
      static_cast<int>(std::lround(config.retiree_home_fraction * n_homes));
  retiree_homes = std::min(retiree_homes, static_cast<int>(retirees.size()));
  if (retiree_homes == n_homes && (!minors.empty() || !adults.empty()))
    retiree_homes = n_homes - 1;
  w.households.resize(n_homes);
  for (int h = 0; h < n_homes; ++h) w.households[h].home = homes[h];
  w.household_of.assign(w.persons.size(), -1);
  auto join = [&](int h, PersonId p) {
    w.households[h].members.push_back(p);
    w.household_of[p] = h;
    w.persons[p].home = w.households[h].home;
  };

  // Retiree-only homes take up to two retirees each.
  std::size_t next_retiree = 0;
  for (int round = 0; round < 2 && retiree_homes > 0; ++round)
    for (int h = 0; h < retiree_homes && next_retiree < retirees.size(); ++h)
      join(h, retirees[next_retiree++]);

  const int open_homes = n_homes - retiree_homes;
  std::vector<PersonId> rest;
  std::size_t next_adult = 0;
  for (int h = retiree_homes; h < n_homes && next_adult < adults.size(); ++h)
    join(h, adults[next_adult++]);
  rest.insert(rest.end(), minors.begin(), minors.end());
  rest.insert(rest.end(), adults.begin() + static_cast<std::ptrdiff_t>(next_adult), adults.end());
  rest.insert(rest.end(), retirees.begin() + static_cast<std::ptrdiff_t>(next_retiree),
              retirees.end());
  rng.shuffle(std::span<PersonId>(rest));
  if (open_homes > 0) {
    for (std::size_t k = 0; k < rest.size(); ++k)
      join(retiree_homes + static_cast<int>(k % open_homes), rest[k]);
  } else {
    for (std::size_t k = 0; k < rest.size(); ++k) join(static_cast<int>(k % n_homes), rest[k]);
  }
  for (auto& hh : w.households) std::sort(hh.members.begin(), hh.members.end());

  // Workplaces: small venues fill to capacity first, offices share the rest.
  const LocationKind staffed_first[] = {LocationKind::school, LocationKind::hospital,
                                        LocationKind::grocery, LocationKind::retail,
                                        LocationKind::hair_salon};
  std::size_t next_worker = 0;
  for (auto kind : staffed_first) {
    for (LocationId id : w.locations_of(kind)) {
      int cap = w.locations[id].capacity.worker;
      for (int k = 0; k < cap && next_worker < adults.size(); ++k)
        w.persons[adults[next_worker++]].work_or_school = id;
    }
  }
  auto offices = w.locations_of(LocationKind::office);
  {
    std::vector<int> filled(offices.size(), 0);
    std::size_t cursor = 0;
    while (next_worker < adults.size()) {
      bool placed = false;
      for (std::size_t tries = 0; tries < offices.size(); ++tries) {
        std::size_t o = (cursor + tries) % offices.size();
        if (filled[o] < w.locations[offices[o]].capacity.worker) {
          ++filled[o];
          w.persons[adults[next_worker++]].work_or_school = offices[o];
          cursor = o + 1;
          placed = true;
          break;
        }
      }
      if (!placed) {
        std::ostringstream msg;
        msg << "insufficient worker capacity: " << adults.size() << " working adults but "
            << next_worker << " worker slots (deficit " << (adults.size() - next_worker) << ")";
        throw ConfigError(msg.str());
      }
    }
  }

  auto schools = w.locations_of(LocationKind::school);
  {
    std::vector<int> filled(schools.size(), 0);
    std::size_t placed_count = 0;
    for (std::size_t k = 0; k < minors.size(); ++k) {
      bool placed = false;
      for (std::size_t tries = 0; tries < schools.size(); ++tries) {
        std::size_t s = (k + tries) % schools.size();
        if (filled[s] < w.locations[schools[s]].capacity.visitor) {
          ++filled[s];
          w.persons[minors[k]].work_or_school = schools[s];
          placed = true;
          ++placed_count;
          break;
        }
      }
      if (!placed) {
        std::ostringstream msg;
        msg << "insufficient school capacity: " << minors.size() << " minors but "
            << placed_count << " student seats (deficit " << (minors.size() - placed_count)
            << ")";
        throw ConfigError(msg.str());
      }
    }
  }

  // Favourite venues and fixed errand slots.
  auto pick = [&](LocationKind kind) -> LocationId {
    auto ids = w.locations_of(kind);
    if (ids.empty()) return kNoLocation;
    return ids[rng.below(ids.size())];
  };
  for (auto& p : w.persons) {
    if (p.category == AgeCategory::minor) continue;
    p.favorites.grocery = pick(LocationKind::grocery);
    p.favorites.retail = pick(LocationKind::retail);
    p.favorites.hair_salon = pick(LocationKind::hair_salon);
    if (p.favorites.grocery != kNoLocation)
      p.grocery_slot = make_slot(w.locations[p.favorites.grocery], 7, p, w, rng);
    if (p.favorites.retail != kNoLocation)
      p.retail_slot = make_slot(w.locations[p.favorites.retail], 7, p, w, rng);
    if (p.favorites.hair_salon != kNoLocation)
      p.salon_slot = make_slot(w.locations[p.favorites.hair_salon], 28, p, w, rng);
  }

  for (auto& hh : w.households) {
    hh.next_social_event = config.social_events_per_month > 0.0
                               ? event_interval(config.social_events_per_month, rng) - 1
                               : std::numeric_limits<int>::max();
  }
  return w;
}

std::vector<SocialEvent> schedule_social_events(World& world, const Calendar& calendar,
                                                const Regulation& regulation, SeededRng& rng) {
  std::vector<SocialEvent> events;
  const auto& cfg = world.config;
  if (cfg.social_events_per_month <= 0.0 || world.persons.empty()) return events;
  std::vector<std::uint8_t> taken;
  const int end_hour = std::min(24, cfg.social_event_start_hour + cfg.social_event_hours);

  for (std::size_t h = 0; h < world.households.size(); ++h) {
    auto& hh = world.households[h];
    if (hh.next_social_event != calendar.day) continue;
    hh.next_social_event += event_interval(cfg.social_events_per_month, rng);

    int present = 0;
    bool cancelled = false;
    for (PersonId m : hh.members) {
      const auto& member = world.persons[m];
      auto c = member.disease.compartment;
      if (c != Compartment::dead && c != Compartment::hospitalized) ++present;
      // a home-bound member calls the gathering off
      bool home_bound = (regulation.stay_home_if_sick && member.test_status == TestStatus::positive) ||
                        member.quarantined;
      if (home_bound && c != Compartment::dead && rng.bernoulli(member.compliance)) cancelled = true;
    }
    if (present == 0 || cancelled) continue;

    if (taken.empty()) taken.assign(world.persons.size(), 0);
    SocialEvent ev;
    ev.household = static_cast<int>(h);
    ev.home = hh.home;
    ev.start_hour = cfg.social_event_start_hour;
    ev.end_hour = end_hour;
    int size = present;
    const int attempts = 3 * cfg.social_event_invitees;
    int invited = 0;
    for (int a = 0; a < attempts && invited < cfg.social_event_invitees; ++a) {
      auto pid = static_cast<PersonId>(rng.below(world.persons.size()));
      const auto& guest = world.persons[pid];
      if (world.household_of[pid] == static_cast<int>(h) || taken[pid]) continue;
      auto c = guest.disease.compartment;
      if (c == Compartment::dead || is_critical(c)) continue;
      ++invited;
      taken[pid] = 1;
      if (auto limit = regulation.gathering_limit.for_risk(guest.risk)) {
        bool complies = rng.bernoulli(guest.compliance);
        if (complies && size + 1 > *limit) continue;
      }
      ev.guests.push_back(pid);
      ++size;
    }
    std::sort(ev.guests.begin(), ev.guests.end());
    events.push_back(std::move(ev));
  }
  return events;
}

void Occupancy::clear(std::size_t location_count) {
  lists_.resize(location_count * 3);
  for (auto& l : lists_) l.clear();
}

Placement plan_person_hour(const World& world, const PersonState& person, const Calendar& cal,
                           const HourContext& ctx, SeededRng& rng) {
  const Regulation& reg = *ctx.regulation;
  Placement home{person.home, Role::worker, true};
  bool complied = true;
  if (reg.has_advisory() || person.quarantined) complied = rng.bernoulli(person.compliance);
  home.complied = complied;

  if (person.disease.compartment == Compartment::needs_hospital) return home;
  bool home_bound =
      (reg.stay_home_if_sick && person.test_status == TestStatus::positive) || person.quarantined;
  if (complied && home_bound) return home;

  if (!ctx.event_of.empty()) {
    int ev = ctx.event_of[person.id];
    if (ev >= 0) {
      const auto& e = ctx.events[ev];
      if (cal.hour >= e.start_hour && cal.hour < e.end_hour)
        return {e.home, Role::visitor, complied};
    }
  }

  auto enterable = [&](const Location& loc) {
    return !loc.locked && !reg.locked_kinds.contains(loc.kind) &&
           loc.open_hours.is_open(cal.weekday(), cal.hour);
  };

  if (person.work_or_school && !cal.is_weekend()) {
    const Location& job = world.locations[*person.work_or_school];
    if (cal.hour >= job.shift_start && cal.hour < job.shift_end && enterable(job)) {
      Role role = person.category == AgeCategory::minor ? Role::visitor : Role::worker;
      return {job.id, role, complied};
    }
  }

  auto try_errand = [&](LocationId id, const ErrandSlot& slot) -> std::optional<Placement> {
    if (id == kNoLocation || !slot.due(cal)) return std::nullopt;
    const Location& loc = world.locations[id];
    if (!enterable(loc)) return std::nullopt;
    int cap = loc.capacity.visitor;
    if (cap >= 0 && ctx.visitor_count[id] >= cap) return std::nullopt;
    ++ctx.visitor_count[id];
    return Placement{id, Role::visitor, complied};
  };
  if (auto p = try_errand(person.favorites.grocery, person.grocery_slot)) return *p;
  if (auto p = try_errand(person.favorites.retail, person.retail_slot)) return *p;
  if (auto p = try_errand(person.favorites.hair_salon, person.salon_slot)) return *p;
  return home;
}

std::string world_snapshot_json(const World& world) {
  nlohmann::json j;
  j["population"] = world.persons.size();
  std::array<int, 3> categories{};
  int high_risk = 0;
  for (const auto& p : world.persons) {
    ++categories[static_cast<int>(p.category)];
    if (p.risk == RiskClass::high) ++high_risk;
  }
  j["minors"] = categories[0];
  j["working_adults"] = categories[1];
  j["retirees"] = categories[2];
  j["high_risk"] = high_risk;
  j["households"] = world.households.size();
  j["hospital_capacity"] = world.beds.capacity();
  auto& locs = j["locations"] = nlohmann::json::array();
  for (const auto& l : world.locations) {
    locs.push_back({{"id", l.id},
                    {"kind", to_string(l.kind)},
                    {"worker_capacity", l.capacity.worker},
                    {"visitor_capacity", l.capacity.visitor},
                    {"patient_capacity", l.capacity.patient},
                    {"contact_rates",
                     {l.contact_rates.worker_worker, l.contact_rates.worker_visitor,
                      l.contact_rates.visitor_visitor}},
                    {"locked", l.locked}});
  }
  return j.dump();
}

}  // namespace pansim
