#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pansim/rng.hpp"
#include "pansim/types.hpp"

namespace pansim {

enum class Compartment : std::uint8_t {
  susceptible,
  exposed,
  presymptomatic,
  preasymptomatic,
  symptomatic,
  asymptomatic,
  hospitalized,
  needs_hospital,
  recovered,
  dead,
};
inline constexpr int kCompartmentCount = 10;

std::string_view to_string(Compartment c);

inline constexpr bool is_infectious(Compartment c) {
  switch (c) {
    case Compartment::presymptomatic:
    case Compartment::preasymptomatic:
    case Compartment::symptomatic:
    case Compartment::asymptomatic:
    case Compartment::hospitalized:
    case Compartment::needs_hospital:
      return true;
    default:
      return false;
  }
}

// Currently carrying the virus (what a perfect test would detect).
inline constexpr bool is_infected(Compartment c) {
  return c != Compartment::susceptible && c != Compartment::recovered &&
         c != Compartment::dead;
}

inline constexpr bool is_critical(Compartment c) {
  return c == Compartment::hospitalized || c == Compartment::needs_hospital;
}

/// True when `from -> to` is an edge of the progression machine.
bool is_legal_transition(Compartment from, Compartment to);

struct DiseaseState {
  Compartment compartment = Compartment::susceptible;
  int days_in_compartment = 0;
  // Whole days to spend in the current compartment; 0 when the exit is
  // governed by a daily rate instead.
  int duration_days = 0;
  std::optional<Compartment> committed_next;

  bool operator==(const DiseaseState&) const = default;
};

struct Triangular {
  double min = 0.0;
  double mode = 0.0;
  double max = 0.0;

  double mean() const { return (min + mode + max) / 3.0; }
  bool ordered() const { return min <= mode && mode <= max; }
};

// Age strata 0-4, 5-17, 18-49, 50-64, 65+.
inline constexpr int kAgeGroupCount = 5;
using AgeVector = std::array<double, kAgeGroupCount>;
int age_group(int age);

/// Progression parameters. Durations are in days, rates are per day and
/// percentages are stored as given (YHR, HFR in %; unserved death as a
/// fraction).
struct SeirParams {
  Triangular latent_days{1.9, 2.9, 3.9};
  double symptomatic_fraction = 0.57;
  double presymptomatic_days = 2.3;
  double preasymptomatic_days = 2.3;
  Triangular symptomatic_recovery_days{3.0, 4.0, 5.0};
  Triangular asymptomatic_recovery_days{3.0, 4.0, 5.0};
  Triangular hospital_recovery_days{9.4, 10.7, 12.8};
  double needs_hospital_recovery_rate = 0.0214;
  AgeVector yhr_overall_pct{0.07018, 0.07018, 4.735, 16.33, 25.54};
  AgeVector yhr_low_risk_pct{0.04021, 0.03091, 1.903, 4.114, 4.879};
  AgeVector yhr_high_risk_pct{0.4021, 0.3091, 19.03, 41.14, 48.79};
  AgeVector hfr_pct{4.0, 12.365, 3.122, 10.745, 23.158};
  double symptom_to_hospital_rate = 0.1695;
  Triangular hospital_death_days{5.2, 8.1, 10.1};
  AgeVector unserved_death_prob{0.239, 0.3208, 0.2304, 0.3049, 0.4269};
  double unserved_death_rate = 0.3;

  double hospitalization_probability(int group, RiskClass risk) const;
  double hospital_fatality_probability(int group) const;

  // Rate of symptomatic cases moving to hospital:
  //   pi = gamma_Y * YHR / (eta + (gamma_Y - eta) * YHR)
  double pi(int group, RiskClass risk) const;
  // Death rate among the hospitalized:
  //   nu = gamma_H * HFR / (mu + (gamma_H - mu) * HFR)
  double nu(int group) const;

  // Throws ConfigError naming the first bad field.
  void validate() const;
};

/// Per-person inputs to progression.
struct PatientTraits {
  int age_group = 0;
  RiskClass risk = RiskClass::normal;
};

/// Bed bookkeeping across all hospitals of a world.
class HospitalBeds {
 public:
  struct Ward {
    LocationId hospital = kNoLocation;
    int capacity = 0;
    int occupied = 0;
    bool operator==(const Ward&) const = default;
  };

  void add_ward(LocationId hospital, int capacity) { wards_.push_back({hospital, capacity, 0}); }
  // First hospital with a free bed, which is then occupied.
  std::optional<LocationId> admit();
  bool has_free_bed() const;
  void discharge(LocationId hospital);
  int capacity() const;
  int occupied() const;
  std::span<const Ward> wards() const { return wards_; }
  bool operator==(const HospitalBeds&) const = default;

 private:
  std::vector<Ward> wards_;
};

/// Samples the duration and committed branch of compartment `c`.
DiseaseState enter_compartment(Compartment c, const PatientTraits& traits,
                               const SeirParams& params, SeededRng& rng);

struct Progression {
  Compartment from;
  Compartment to;
  bool changed() const { return from != to; }
};

/// Advances one person's state by one day. `hospital` is updated with the
/// ward the person occupies (kNoLocation when not admitted).
Progression seir_daily_update(DiseaseState& state, LocationId& hospital,
                              const PatientTraits& traits, const SeirParams& params,
                              HospitalBeds& beds, SeededRng& rng);

/// Bounded Gaussian spread rate a^k; resamples until the draw falls in [0, 1].
double draw_spread_rate(double mean, double sd, SeededRng& rng);

/// One infectious partner seen by a susceptible person in one hour, with the
/// regulation multiplier that applied to the transmitter.
struct InfectiousContact {
  double spread_rate = 0.0;
  double multiplier = 1.0;
};

/// Probability of not being infected in one hour: prod_k (1 - a^k * m_k).
double hourly_survival(std::span<const InfectiousContact> contacts);
/// Same, checking that the receiving person is susceptible.
double hourly_survival(Compartment person, std::span<const InfectiousContact> contacts);

/// 1 - prod_t survival(t) over the hours of a day.
double daily_infection_probability(std::span<const double> hourly_survivals);

struct Contact {
  PersonId a = 0;  // a < b
  PersonId b = 0;
  bool operator==(const Contact&) const = default;
  auto operator<=>(const Contact&) const = default;
};

struct ContactSet {
  LocationId location = kNoLocation;
  int hour = 0;
  std::vector<Contact> pairs;
};

/// Reusable buffers for sample_contacts.
struct ContactScratch {
  std::vector<int> ww_degree;
  std::vector<int> wv_degree;
  std::vector<int> vv_degree;
  std::vector<int> deficient;
  std::vector<std::vector<int>> partners;
  std::vector<int> slot;
};

/// Samples one hour of contacts among the occupants of a location. Every pair
/// is drawn independently with its rate component; persons whose degree falls
/// under a floor get extra partners drawn uniformly (floors only apply when
/// some effective rate is positive). Pairs are appended to `out`.
void sample_contacts(std::span<const PersonId> workers, std::span<const PersonId> visitors,
                     const ContactRates& effective_rates, const MinContacts& floors,
                     SeededRng& rng, std::vector<Contact>& out, ContactScratch& scratch);

ContactSet sample_contacts(LocationId location, int hour, std::span<const PersonId> workers,
                           std::span<const PersonId> visitors, const ContactRates& effective_rates,
                           const MinContacts& floors, SeededRng& rng);

/// Accumulates the survival products for every person over one
/// day: an hourly product that is folded into the daily product at hour end.
class ExposureLedger {
 public:
  void reset(std::size_t population);
  // `transmit[k]` is a^k times the transmitter's multiplier this hour (0 for
  // non-infectious persons); `susceptible[k]` marks receivers.
  void add_contact(const Contact& c, std::span<const double> transmit,
                   std::span<const std::uint8_t> susceptible);
  void end_hour();
  double infection_probability(PersonId p) const { return 1.0 - day_survival_[p]; }
  double day_survival(PersonId p) const { return day_survival_[p]; }

 private:
  std::vector<double> hour_survival_;
  std::vector<double> day_survival_;
  std::vector<PersonId> touched_;
};

}  // namespace pansim
