#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pansim/engine.hpp"

namespace pansim {

/// Streaming mean and variance.
class Welford {
 public:
  void add(double x);
  void merge(const Welford& other);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  // Sample variance (n - 1 denominator); 0 for fewer than two values.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct RunMetrics {
  double peak_infected = 0;
  double peak_day = 0;
  double peak_critical = 0;
  double cumulative_deaths = 0;
  double cumulative_infections = 0;
  double time_to_peak_deaths = 0;
  double duration_days = 0;
  double economic_cost = 0;  // magnitude of the summed stage term
  double total_reward = 0;

  double get(const std::string& name) const;
};

const std::vector<std::string>& metric_names();

// Daily death increments smoothed by a centered 7-day mean (truncated at the
// ends); returns the first day of the maximum.
int time_to_peak_deaths(const std::vector<DayRecord>& records);

RunMetrics compute_metrics(const std::vector<DayRecord>& records, int population);

/// Mean and variance per day of every numeric DayRecord field, plus the
/// scalar metrics.
struct AggregateStats {
  int seeds = 0;
  std::vector<std::string> daily_fields;
  std::vector<std::vector<Welford>> daily;  // [day][field]
  std::map<std::string, Welford> metrics;

  double mean(const std::string& metric) const { return metrics.at(metric).mean(); }
  double variance(const std::string& metric) const { return metrics.at(metric).variance(); }
};

const std::vector<std::string>& daily_field_names();
std::vector<double> daily_fields(const DayRecord& r);

struct SeedRun {
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::vector<DayRecord> records;
  std::vector<DayContacts> contact_log;
  std::vector<std::string> warnings;
};

struct ConditionResult {
  std::string name;
  std::vector<SeedRun> runs;  // sorted by seed
  AggregateStats stats;
};

using PolicyFactory = std::function<std::unique_ptr<StagePolicy>()>;

PolicyFactory policy_factory(const std::string& name);

struct MultiSeedOptions {
  int horizon_days = 120;
  int jobs = 1;           // 0 = hardware concurrency
  bool keep_records = true;
};

/// Runs every seed independently and aggregates in seed order.
ConditionResult multi_seed(const SimConfig& config, const PolicyFactory& policy,
                           std::vector<std::uint64_t> seeds, const MultiSeedOptions& options = {},
                           const std::string& name = "");

AggregateStats aggregate(const std::vector<SeedRun>& runs);

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count);

enum class SweepAxis { spread_rate, contact_rate, gathering_size };
SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

/// Config with one axis scaled. For gathering_size the level is the limit
/// (negative = none).
SimConfig apply_sweep_level(const SimConfig& base, SweepAxis axis, double level);

std::vector<ConditionResult> sensitivity_sweep(const SimConfig& base, SweepAxis axis,
                                               const std::vector<double>& levels,
                                               const std::vector<std::uint64_t>& seeds,
                                               const PolicyFactory& policy,
                                               const MultiSeedOptions& options = {});

struct CalibrationResult {
  double chosen = 0.0;
  std::vector<std::pair<double, double>> table;  // (mean, mean time-to-peak deaths)
};

/// Grid search on the spread-rate mean (sd held at `sd`) under the Swedish
/// policy; picks the value whose mean time-to-peak deaths is closest to
/// `target_days` (first on ties).
CalibrationResult calibrate_spread_rate(const SimConfig& base, const std::vector<double>& grid,
                                        double target_days,
                                        const std::vector<std::uint64_t>& seeds,
                                        const MultiSeedOptions& options = {}, double sd = 0.01);

/// Index of the entry closest to target (first on ties).
std::size_t closest_to_target(const std::vector<std::pair<double, double>>& table, double target);

std::vector<ConditionResult> testing_matrix(const SimConfig& base,
                                            const std::vector<TracingStrategy>& presets,
                                            const std::vector<std::uint64_t>& seeds,
                                            const PolicyFactory& policy,
                                            const MultiSeedOptions& options = {});

/// Disjoint sets over 0..n-1 with path halving and union by size.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t components_;
};

struct DailyContactGraph {
  int day = 0;
  std::size_t edges = 0;
  std::size_t components = 0;
};

std::vector<DailyContactGraph> connectivity_series(const std::vector<DayContacts>& log,
                                                   std::size_t population);

struct WeekendMaxima {
  int weeks = 0;      // weeks with both neighbours in range
  int local_max = 0;  // weeks where the weekend peaks above Friday and Monday
  double fraction() const { return weeks > 0 ? static_cast<double>(local_max) / weeks : 0.0; }
};

WeekendMaxima weekend_local_maxima(const std::vector<DailyContactGraph>& series);

// Tidy rows: condition,seed,metric,value
void write_tidy_csv(std::ostream& out, const std::vector<ConditionResult>& conditions,
                    const std::string& metadata);
// condition,metric,mean,variance,n
void write_summary_csv(std::ostream& out, const std::vector<ConditionResult>& conditions,
                       const std::string& metadata);
// day plus mean/variance of each daily field
void write_daily_summary_csv(std::ostream& out, const AggregateStats& stats,
                             const std::string& metadata);

}  // namespace pansim
