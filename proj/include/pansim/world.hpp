#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pansim/disease.hpp"
#include "pansim/regulation.hpp"
#include "pansim/rng.hpp"
#include "pansim/types.hpp"

namespace pansim {

/// Weekly opening schedule: one 24-bit hour mask per weekday.
class OpenHours {
 public:
  static OpenHours always();
  // Open [start, end) on each listed weekday.
  static OpenHours daily(std::initializer_list<int> weekdays, int start, int end);

  bool is_open(int weekday, int hour) const { return (mask_[weekday] >> hour) & 1u; }
  void set(int weekday, int hour, bool open);
  bool operator==(const OpenHours&) const = default;

 private:
  std::array<std::uint32_t, 7> mask_{};
};

struct RoleCapacity {
  int worker = 0;
  int visitor = 0;
  int patient = 0;
  bool operator==(const RoleCapacity&) const = default;
};

/// One kind of venue and how many of it a town has.
struct LocationTypeConfig {
  LocationKind kind = LocationKind::home;
  int count = 0;
  RoleCapacity capacity;
  ContactRates contact_rates;
  MinContacts min_contacts;
  OpenHours open_hours = OpenHours::always();
  // Weekday hours [shift_start, shift_end) worked by assigned workers (and
  // attended by students at schools).
  int shift_start = 9;
  int shift_end = 17;
};

struct AgeBucket {
  int min_age = 0;
  int max_age = 0;  // inclusive
  double fraction = 0.0;
};

struct PopulationConfig {
  int size = 1000;
  std::vector<AgeBucket> age_histogram;
  double retiree_home_fraction = 0.15;
  double high_risk_fraction = 0.2;
  double compliance = 0.99;
  double spread_rate_mean = 0.03;
  double spread_rate_sd = 0.01;
  std::vector<LocationTypeConfig> locations;
  double social_events_per_month = 2.0;
  int social_event_start_hour = 18;
  int social_event_hours = 5;
  int social_event_invitees = 20;

  const LocationTypeConfig* find(LocationKind kind) const;
  LocationTypeConfig* find(LocationKind kind);

  static std::vector<AgeBucket> us_age_histogram();
  static PopulationConfig town_1k();
  static PopulationConfig town_10k();
};

// Throws ConfigError on the first bad field.
void validate_population(const PopulationConfig& config);

struct Favorites {
  LocationId grocery = kNoLocation;
  LocationId retail = kNoLocation;
  LocationId hair_salon = kNoLocation;
  bool operator==(const Favorites&) const = default;
};

/// A recurring errand: visit on the day where day % period == day_offset, at
/// `hour`, for one hour.
struct ErrandSlot {
  int period_days = 7;
  int day_offset = -1;  // -1: never
  int hour = 0;

  bool due(const Calendar& cal) const {
    return day_offset >= 0 && cal.hour == hour && cal.day % period_days == day_offset;
  }
  bool operator==(const ErrandSlot&) const = default;
};

struct PersonState {
  PersonId id = 0;
  int age = 0;
  RiskClass risk = RiskClass::normal;
  AgeCategory category = AgeCategory::working_adult;
  LocationId home = kNoLocation;
  std::optional<LocationId> work_or_school;
  Favorites favorites;
  ErrandSlot grocery_slot{7};
  ErrandSlot retail_slot{7};
  ErrandSlot salon_slot{28};
  double compliance = 1.0;
  double spread_rate = 0.0;
  DiseaseState disease;
  LocationId ward = kNoLocation;  // hospital bed when hospitalized
  TestStatus test_status = TestStatus::untested;
  bool ever_positive = false;
  bool quarantined = false;
  int quarantine_until = -1;

  PatientTraits traits() const { return {age_group(age), risk}; }
  bool operator==(const PersonState&) const = default;
};

struct Location {
  LocationId id = 0;
  LocationKind kind = LocationKind::home;
  OpenHours open_hours;
  RoleCapacity capacity;
  ContactRates contact_rates;
  MinContacts min_contacts;
  int shift_start = 9;
  int shift_end = 17;
  bool locked = false;
  bool operator==(const Location&) const = default;
};

struct Household {
  LocationId home = kNoLocation;
  std::vector<PersonId> members;
  int next_social_event = 0;
  bool operator==(const Household&) const = default;
};

/// Occupants of every location for the current hour, split by role. Lists
/// are sorted by person id.
class Occupancy {
 public:
  void clear(std::size_t location_count);
  void add(LocationId loc, Role role, PersonId p) { lists_[slot(loc, role)].push_back(p); }
  std::span<const PersonId> occupants(LocationId loc, Role role) const {
    return lists_[slot(loc, role)];
  }
  int count(LocationId loc, Role role) const {
    return static_cast<int>(lists_[slot(loc, role)].size());
  }

 private:
  static std::size_t slot(LocationId loc, Role role) {
    return static_cast<std::size_t>(loc) * 3 + static_cast<std::size_t>(role);
  }
  std::vector<std::vector<PersonId>> lists_;
};

struct World {
  std::vector<PersonState> persons;
  std::vector<Location> locations;
  std::vector<Household> households;
  std::vector<int> household_of;  // person id -> household index
  std::array<std::vector<LocationId>, kLocationKindCount> by_kind;
  HospitalBeds beds;
  LocationId cemetery = kNoLocation;
  PopulationConfig config;

  std::span<const LocationId> locations_of(LocationKind kind) const {
    return by_kind[static_cast<int>(kind)];
  }
  bool operator==(const World& other) const {
    return persons == other.persons && locations == other.locations &&
           households == other.households && household_of == other.household_of &&
           beds == other.beds && cemetery == other.cemetery;
  }
};

World build_population(const PopulationConfig& config, SeededRng& rng);

/// A home gathering: guests travel to the host home for the event hours.
struct SocialEvent {
  int household = 0;
  LocationId home = kNoLocation;
  int start_hour = 18;
  int end_hour = 23;  // exclusive
  std::vector<PersonId> guests;
};

/// Emits today's gatherings and reschedules each host household. Guests are
/// invited uniformly from outside the household; each guest joins only while
/// the gathering is below the limit for that guest's risk class (unless the
/// guest ignores advisory rules on their compliance draw).
std::vector<SocialEvent> schedule_social_events(World& world, const Calendar& calendar,
                                                const Regulation& regulation, SeededRng& rng);

/// Hourly bookkeeping used while planning movement.
struct HourContext {
  const Regulation* regulation = nullptr;
  // Per person: guest at this event (-1 when none) for today.
  std::span<const int> event_of;
  std::span<const SocialEvent> events;
  // Visitors already admitted this hour per location (capacity checks).
  std::span<int> visitor_count;
};

struct Placement {
  LocationId location = kNoLocation;
  Role role = Role::visitor;
  bool complied = true;  // compliance draw outcome for the hour
};

/// Where `person` spends this hour. Persons in hospital or the cemetery
/// are placed by the caller; this handles everyone else.
Placement plan_person_hour(const World& world, const PersonState& person, const Calendar& calendar,
                           const HourContext& ctx, SeededRng& rng);

/// Structural snapshot for clients: locations and demographics only.
std::string world_snapshot_json(const World& world);

}  // namespace pansim
