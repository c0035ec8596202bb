#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pansim/disease.hpp"
#include "pansim/regulation.hpp"
#include "pansim/rng.hpp"
#include "pansim/world.hpp"

namespace pansim {

inline constexpr double kMaskMultiplier = 0.6;
inline constexpr double kHygieneMultiplier = 0.8;

/// base * (1 - beta), component-wise.
ContactRates effective_contact_rates(const ContactRates& base, const Regulation& regulation);

/// Spread multiplier applied to a transmitter this hour.
double transmission_multiplier(const Regulation& regulation, bool complied);

struct TestingConfig {
  double random_rate = 0.02;
  double symptomatic_rate = 0.3;
  double critical_rate = 1.0;
  double false_positive = 0.001;
  double false_negative = 0.01;
  double retest_positive_rate = 0.033;
  int result_delay_days = 0;

  void validate() const;
};

/// Contact-tracing behaviour layered on top of the stage regulations.
struct TracingConfig {
  int horizon_days = 0;
  bool stay_home_if_sick = false;     // forced on regardless of stage
  bool quarantine_contacts = false;
  int quarantine_days = 14;
  double trace_miss_probability = 0.0;

  void validate() const;
};

/// A named testing/tracing combination.
struct TracingStrategy {
  std::string name;
  TestingConfig testing;
  TracingConfig tracing;
};

std::vector<TracingStrategy> tracing_presets();
TracingStrategy tracing_preset(std::string_view name);

/// What the government sees.
struct PerceivedSummary {
  int infected = 0;   // currently positive and alive
  int critical = 0;   // positive and hospitalized or needing a hospital
  int dead = 0;
  int recovered = 0;  // previously positive, then a negative retest
  bool operator==(const PerceivedSummary&) const = default;
};

PerceivedSummary perceived_summary(const World& world);

struct TestResult {
  PersonId person = 0;
  bool positive = false;
  bool new_positive = false;  // status changed to positive by this result
};

/// One day of testing. Results due today are applied to person state;
/// results with a delay are queued in `pending`.
struct PendingResult {
  int due_day = 0;
  PersonId person = 0;
  bool positive = false;
};

std::vector<TestResult> run_testing(World& world, const TestingConfig& cfg, int day,
                                    std::deque<PendingResult>& pending, SeededRng& rng);

/// Interaction counts per person pair over the last `horizon` days.
class ContactRegistry {
 public:
  explicit ContactRegistry(int horizon_days = 0) : horizon_(horizon_days) {}

  int horizon_days() const { return horizon_; }

  // Opens day `day`, evicting days older than the horizon.
  void begin_day(int day, std::size_t population);
  void record(const Contact& c);
  void record(std::span<const Contact> contacts);
  void record(const ContactSet& set) { record(set.pairs); }
  // Closes the open day so its pairs become queryable.
  void end_day();

  // Sorted distinct partners of `p` within the horizon.
  std::vector<PersonId> contacts_of(PersonId p) const;
  // Interactions of the pair on `day` (0 when unknown or evicted).
  int count(const Contact& c, int day) const;
  std::size_t days_held() const { return days_.size(); }
  std::optional<int> oldest_day() const;
  bool empty() const;

 private:
  struct Day {
    int day = 0;
    std::vector<Contact> open;                     // raw pairs while the day is open
    std::vector<std::pair<Contact, int>> counts;   // sorted distinct pairs
    std::vector<std::size_t> offsets;              // CSR adjacency
    std::vector<PersonId> neighbors;
    bool closed = false;
  };
  int horizon_;
  std::deque<Day> days_;
};

/// First-order contacts of `index` plus their households, excluding the
/// index case. Sorted.
std::vector<PersonId> quarantine_first_order(const ContactRegistry& registry, PersonId index,
                                             const World& world);

}  // namespace pansim
