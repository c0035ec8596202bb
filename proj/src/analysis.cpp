#include "pansim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "pansim/heuristics.hpp"

namespace pansim {

void Welford::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void Welford::merge(const Welford& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{
      "peak_infected",       "peak_day",      "peak_critical", "cumulative_deaths",
      "cumulative_infections", "time_to_peak_deaths", "duration_days", "economic_cost",
      "total_reward"};
  return names;
}

double RunMetrics::get(const std::string& name) const {
  if (name == "peak_infected") return peak_infected;
  if (name == "peak_day") return peak_day;
  if (name == "peak_critical") return peak_critical;
  if (name == "cumulative_deaths") return cumulative_deaths;
  if (name == "cumulative_infections") return cumulative_infections;
  if (name == "time_to_peak_deaths") return time_to_peak_deaths;
  if (name == "duration_days") return duration_days;
  if (name == "economic_cost") return economic_cost;
  if (name == "total_reward") return total_reward;
  throw ConfigError("unknown metric '" + name + "'");
}

int time_to_peak_deaths(const std::vector<DayRecord>& records) {
  const int n = static_cast<int>(records.size());
  if (n == 0) return 0;
  const int dead = static_cast<int>(Compartment::dead);
  std::vector<double> inc(n);
  for (int d = 0; d < n; ++d)
    inc[d] = records[d].true_summary[dead] - (d > 0 ? records[d - 1].true_summary[dead] : 0);
  int best_day = 0;
  double best = -1.0;
  for (int d = 0; d < n; ++d) {
    const int lo = std::max(0, d - 3);
    const int hi = std::min(n - 1, d + 3);
    double sum = 0.0;
    for (int k = lo; k <= hi; ++k) sum += inc[k];
    const double avg = sum / (hi - lo + 1);
    if (avg > best + 1e-12) {
      best = avg;
      best_day = records[d].day;
    }
  }
  return best_day;
}

RunMetrics compute_metrics(const std::vector<DayRecord>& records, int population) {
  RunMetrics m;
  if (records.empty()) return m;
  int peak = -1;
  int peak_day = 0;
  for (const auto& r : records) {
    const int inf = r.infected();
    if (inf > peak) {
      peak = inf;
      peak_day = r.day;
    }
    m.peak_critical = std::max<double>(m.peak_critical, r.n_critical);
    m.economic_cost -= r.reward.economic;
    m.total_reward += r.reward.total();
  }
  m.peak_infected = peak;
  m.peak_day = peak_day;
  const auto& last = records.back();
  m.cumulative_deaths = last.true_summary[static_cast<int>(Compartment::dead)];
  m.cumulative_infections = population - last.true_summary[static_cast<int>(Compartment::susceptible)];
  m.time_to_peak_deaths = time_to_peak_deaths(records);
  m.duration_days = static_cast<double>(records.size());
  for (const auto& r : records) {
    if (r.day > peak_day && r.infected() < 0.01 * population) {
      m.duration_days = r.day;
      break;
    }
  }
  return m;
}

const std::vector<std::string>& daily_field_names() {
  static const std::vector<std::string> names{
      "stage", "S", "E", "preY", "preA", "Y", "A", "H", "N", "R", "D",
      "perceived_infected", "perceived_critical", "perceived_dead", "n_critical", "reward",
      "reward_health", "reward_econ", "reward_shaping", "contacts"};
  return names;
}

std::vector<double> daily_fields(const DayRecord& r) {
  std::vector<double> v{static_cast<double>(r.stage)};
  for (int c : r.true_summary) v.push_back(c);
  v.push_back(r.perceived.infected);
  v.push_back(r.perceived.critical);
  v.push_back(r.perceived.dead);
  v.push_back(r.n_critical);
  v.push_back(r.reward.total());
  v.push_back(r.reward.health);
  v.push_back(r.reward.economic);
  v.push_back(r.reward.shaping);
  v.push_back(static_cast<double>(r.contacts));
  return v;
}

AggregateStats aggregate(const std::vector<SeedRun>& runs) {
  AggregateStats s;
  s.seeds = static_cast<int>(runs.size());
  s.daily_fields = daily_field_names();
  for (const auto& name : metric_names()) s.metrics[name];
  std::vector<const SeedRun*> ordered;
  for (const auto& r : runs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const SeedRun* a, const SeedRun* b) { return a->seed < b->seed; });
  for (const SeedRun* run : ordered) {
    for (const auto& name : metric_names()) s.metrics[name].add(run->metrics.get(name));
    for (std::size_t d = 0; d < run->records.size(); ++d) {
      if (s.daily.size() <= d) s.daily.emplace_back(s.daily_fields.size());
      auto values = daily_fields(run->records[d]);
      for (std::size_t f = 0; f < values.size(); ++f) s.daily[d][f].add(values[f]);
    }
  }
  return s;
}

PolicyFactory policy_factory(const std::string& name) {
  make_heuristic_policy(name);  // validate eagerly
  return [name] { return make_heuristic_policy(name); };
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> seeds(std::max(0, count));
  std::iota(seeds.begin(), seeds.end(), first);
  return seeds;
}

ConditionResult multi_seed(const SimConfig& config, const PolicyFactory& policy,
                           std::vector<std::uint64_t> seeds, const MultiSeedOptions& options,
                           const std::string& name) {
  if (seeds.empty()) throw ConfigError("multi_seed needs at least one seed");
  std::sort(seeds.begin(), seeds.end());
  ConditionResult out;
  out.name = name;
  out.runs.resize(seeds.size());
  const int population = config.population.size;

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        auto p = policy();
        Trajectory t = run(config, *p, options.horizon_days, seeds[i]);
        SeedRun& r = out.runs[i];
        r.seed = seeds[i];
        r.metrics = compute_metrics(t.records, population);
        r.warnings = std::move(t.warnings);
        r.records = std::move(t.records);
        r.contact_log = std::move(t.contact_log);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (error.empty()) error = "seed " + std::to_string(seeds[i]) + ": " + e.what();
      }
    }
  };
  int jobs = options.jobs > 0 ? options.jobs
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(seeds.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!error.empty()) throw std::runtime_error("multi_seed failed, results withheld: " + error);
  out.stats = aggregate(out.runs);
  if (!options.keep_records) {
    for (auto& r : out.runs) {
      r.records.clear();
      r.records.shrink_to_fit();
    }
  }
  return out;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "spread-rate" || name == "spread_rate" || name == "spread") return SweepAxis::spread_rate;
  if (name == "contact-rate" || name == "contact_rate" || name == "contact") return SweepAxis::contact_rate;
  if (name == "gathering-size" || name == "gathering_size" || name == "gathering")
    return SweepAxis::gathering_size;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::spread_rate: return "spread-rate";
    case SweepAxis::contact_rate: return "contact-rate";
    case SweepAxis::gathering_size: return "gathering-size";
  }
  return "?";
}

SimConfig apply_sweep_level(const SimConfig& base, SweepAxis axis, double level) {
  SimConfig cfg = base;
  switch (axis) {
    case SweepAxis::spread_rate:
      cfg.population.spread_rate_mean *= level;
      break;
    case SweepAxis::contact_rate:
      for (auto& loc : cfg.population.locations) {
        auto& r = loc.contact_rates;
        r.worker_worker = std::min(1.0, r.worker_worker * level);
        r.worker_visitor = std::min(1.0, r.worker_visitor * level);
        r.visitor_visitor = std::min(1.0, r.visitor_visitor * level);
      }
      break;
    case SweepAxis::gathering_size:
      if (level < 0)
        cfg.gathering_limit_override.reset();
      else
        cfg.gathering_limit_override = static_cast<int>(std::lround(level));
      break;
  }
  return cfg;
}

namespace {
std::string level_name(SweepAxis axis, double level) {
  if (axis == SweepAxis::gathering_size && level < 0) return to_string(axis) + "=none";
  return to_string(axis) + "=" + format_number(level);
}
}  // namespace

std::vector<ConditionResult> sensitivity_sweep(const SimConfig& base, SweepAxis axis,
                                               const std::vector<double>& levels,
                                               const std::vector<std::uint64_t>& seeds,
                                               const PolicyFactory& policy,
                                               const MultiSeedOptions& options) {
  if (levels.empty()) throw ConfigError("sensitivity_sweep needs at least one level");
  std::vector<ConditionResult> out;
  for (double level : levels)
    out.push_back(multi_seed(apply_sweep_level(base, axis, level), policy, seeds, options,
                             level_name(axis, level)));
  return out;
}

std::size_t closest_to_target(const std::vector<std::pair<double, double>>& table, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.size(); ++i)
    if (std::abs(table[i].second - target) < std::abs(table[best].second - target)) best = i;
  return best;
}

CalibrationResult calibrate_spread_rate(const SimConfig& base, const std::vector<double>& grid,
                                        double target_days,
                                        const std::vector<std::uint64_t>& seeds,
                                        const MultiSeedOptions& options, double sd) {
  if (grid.empty()) throw ConfigError("calibration grid is empty");
  CalibrationResult result;
  MultiSeedOptions opts = options;
  opts.keep_records = false;
  for (double mean : grid) {
    SimConfig cfg = base;
    cfg.population.spread_rate_mean = mean;
    cfg.population.spread_rate_sd = sd;
    auto r = multi_seed(cfg, policy_factory("SWE"), seeds, opts, "spread=" + format_number(mean));
    result.table.emplace_back(mean, r.stats.mean("time_to_peak_deaths"));
  }
  result.chosen = result.table[closest_to_target(result.table, target_days)].first;
  return result;
}

std::vector<ConditionResult> testing_matrix(const SimConfig& base,
                                            const std::vector<TracingStrategy>& presets,
                                            const std::vector<std::uint64_t>& seeds,
                                            const PolicyFactory& policy,
                                            const MultiSeedOptions& options) {
  std::vector<ConditionResult> out;
  for (const auto& preset : presets) {
    SimConfig cfg = base;
    cfg.testing = preset.testing;
    cfg.tracing = preset.tracing;
    out.push_back(multi_seed(cfg, policy, seeds, options, preset.name));
  }
  return out;
}

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --components_;
  return true;
}

std::vector<DailyContactGraph> connectivity_series(const std::vector<DayContacts>& log,
                                                   std::size_t population) {
  std::vector<DailyContactGraph> out;
  for (const auto& day : log) {
    UnionFind uf(population);
    for (const auto& c : day.pairs) uf.unite(static_cast<std::size_t>(c.a), static_cast<std::size_t>(c.b));
    out.push_back({day.day, day.pairs.size(), uf.components()});
  }
  return out;
}

WeekendMaxima weekend_local_maxima(const std::vector<DailyContactGraph>& series) {
  std::map<int, std::size_t> by_day;
  for (const auto& g : series) by_day[g.day] = g.components;
  WeekendMaxima w;
  for (int week = 0;; ++week) {
    const int fri = 7 * week + 4, mon = 7 * week + 7;
    if (!by_day.count(mon)) break;
    if (!by_day.count(fri) || !by_day.count(fri + 1) || !by_day.count(fri + 2)) continue;
    ++w.weeks;
    const std::size_t weekend = std::max(by_day[fri + 1], by_day[fri + 2]);
    if (weekend > by_day[fri] && weekend > by_day[mon]) ++w.local_max;
  }
  return w;
}

void write_tidy_csv(std::ostream& out, const std::vector<ConditionResult>& conditions,
                    const std::string& metadata) {
  out << "# " << metadata << '\n' << "condition,seed,metric,value\n";
  for (const auto& c : conditions)
    for (const auto& r : c.runs)
      for (const auto& m : metric_names())
        out << c.name << ',' << r.seed << ',' << m << ',' << format_number(r.metrics.get(m)) << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<ConditionResult>& conditions,
                       const std::string& metadata) {
  out << "# " << metadata << '\n' << "condition,metric,mean,variance,n\n";
  for (const auto& c : conditions)
    for (const auto& m : metric_names()) {
      const auto& w = c.stats.metrics.at(m);
      out << c.name << ',' << m << ',' << format_number(w.mean()) << ','
          << format_number(w.variance()) << ',' << w.count() << '\n';
    }
}

void write_daily_summary_csv(std::ostream& out, const AggregateStats& stats,
                             const std::string& metadata) {
  out << "# " << metadata << '\n' << "day";
  for (const auto& f : stats.daily_fields) out << ',' << f << "_mean," << f << "_var";
  out << '\n';
  for (std::size_t d = 0; d < stats.daily.size(); ++d) {
    out << d;
    for (const auto& w : stats.daily[d])
      out << ',' << format_number(w.mean()) << ',' << format_number(w.variance());
    out << '\n';
  }
}

}  // namespace pansim
