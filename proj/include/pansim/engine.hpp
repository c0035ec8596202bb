#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pansim/disease.hpp"
#include "pansim/interventions.hpp"
#include "pansim/regulation.hpp"
#include "pansim/reward.hpp"
#include "pansim/rng.hpp"
#include "pansim/world.hpp"

namespace pansim {

struct SimConfig {
  PopulationConfig population = PopulationConfig::town_1k();
  SeirParams seir;
  TestingConfig testing;
  TracingConfig tracing;
  StageTableKind stage_table = StageTableKind::five_stage;
  RewardParams reward;  // c_max <= 0 means "use the hospital capacity"
  int seed_cohort = 4;
  int activation_threshold = 5;
  bool log_contacts = false;
  // Extra cap on gathering size for everyone, on top of the stage rules.
  std::optional<int> gathering_limit_override;

  void validate() const;
};

using CompartmentCounts = std::array<int, kCompartmentCount>;

struct DayRecord {
  int day = 0;
  int stage = 0;
  CompartmentCounts true_summary{};
  PerceivedSummary perceived;
  int n_critical = 0;
  int hospital_occupancy = 0;
  RewardBreakdown reward;
  std::int64_t contacts = 0;

  int infected() const;  // true count of persons carrying the virus
};

/// Distinct person pairs that met on one day.
struct DayContacts {
  int day = 0;
  std::vector<Contact> pairs;
};

/// One running simulation: world, calendar, regulation, registry, RNG and
/// the records produced so far.
class Simulation {
 public:
  Simulation(const SimConfig& config, std::uint64_t seed);

  // Runs one day under stage `stage` of the configured table (clamped).
  const DayRecord& step_day(int stage);
  // Runs one day under an explicit regulation.
  const DayRecord& step_day(const Regulation& regulation);

  const SimConfig& config() const { return config_; }
  const World& world() const { return world_; }
  World& mutable_world() { return world_; }
  const Calendar& calendar() const { return calendar_; }
  const Regulation& regulation() const { return regulation_; }
  int stage() const { return regulation_.stage; }
  int max_stage() const { return static_cast<int>(table_.size()) - 1; }
  const std::vector<Regulation>& table() const { return table_; }
  const std::vector<DayRecord>& records() const { return records_; }
  const std::vector<DayContacts>& contact_log() const { return contact_log_; }
  const ContactRegistry& registry() const { return registry_; }
  const RewardParams& reward_params() const { return reward_; }
  std::uint64_t seed() const { return seed_; }
  const SeededRng& rng() const { return rng_; }

  CompartmentCounts true_summary() const;
  PerceivedSummary perceived() const { return perceived_summary(world_); }

  // Same world, calendar, regulation and RNG position.
  bool same_state(const Simulation& other) const;

 private:
  void run_hours(std::int64_t& contacts);
  void end_of_day();

  SimConfig config_;
  std::uint64_t seed_;
  SeededRng rng_;
  World world_;
  Calendar calendar_;
  std::vector<Regulation> table_;
  Regulation regulation_;
  RewardParams reward_;
  ContactRegistry registry_;
  std::deque<PendingResult> pending_tests_;
  std::vector<DayRecord> records_;
  std::vector<DayContacts> contact_log_;

  // Per-day scratch.
  ExposureLedger ledger_;
  Occupancy occupancy_;
  ContactScratch contact_scratch_;
  std::vector<Contact> hour_pairs_;
  std::vector<Contact> day_pairs_;
  std::vector<double> transmit_;
  std::vector<std::uint8_t> susceptible_;
  std::vector<int> event_of_;
  std::vector<int> visitor_count_;
  std::vector<PersonId> merged_;
  std::vector<SocialEvent> events_;
};

using SimState = Simulation;

std::unique_ptr<Simulation> reset(const SimConfig& config, std::uint64_t seed);

/// What a government policy may look at. No ground truth.
struct PolicyObservation {
  int day = 0;
  int stage = 0;
  int max_stage = 4;
  PerceivedSummary perceived;
  int population = 0;
  int hospital_capacity = 0;
};

class StagePolicy {
 public:
  virtual ~StagePolicy() = default;
  virtual std::string name() const = 0;
  virtual void reset() {}
  // Desired stage for the next action period.
  virtual int decide(const PolicyObservation& obs) = 0;
  virtual int action_period_days() const { return 1; }
  virtual StageTableKind stage_table() const { return StageTableKind::five_stage; }
};

PolicyObservation observe(const Simulation& sim);

struct Trajectory {
  std::uint64_t seed = 0;
  std::string policy;
  std::vector<DayRecord> records;
  std::vector<DayContacts> contact_log;
  std::vector<std::string> warnings;
  int activation_day = -1;  // first day the policy was consulted
  double total_reward() const;
};

/// Holds stage 0 until perceived infections reach the activation threshold,
/// then consults `policy` once per action period.
Trajectory run(const SimConfig& config, StagePolicy& policy, int horizon_days, std::uint64_t seed);

inline constexpr const char* kDayCsvHeader =
    "day,stage,S,E,preY,preA,Y,A,H,N,R,D,perceived_infected,perceived_critical,perceived_dead,"
    "n_critical,reward,reward_health,reward_econ,reward_shaping,contacts";

std::string format_number(double v);
std::string day_csv_row(const DayRecord& r);
// `metadata` goes on a leading "# " comment line; the body is deterministic.
void write_trajectory_csv(std::ostream& out, const std::vector<DayRecord>& records,
                          const std::string& metadata);

}  // namespace pansim
