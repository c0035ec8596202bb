#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pansim/analysis.hpp"
#include "pansim/config.hpp"
#include "pansim/heuristics.hpp"
#include "pansim/sac.hpp"
#include "pansim/service.hpp"

using namespace pansim;
namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config = "town1k";
  std::string out;
  int seeds = -1;
  long long seed_start = -1;
  int days = -1;
  int jobs = -1;
};

// Usage problems exit 2, everything else 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--config", c.config, "preset (town1k, town10k) or config file");
  cmd->add_option("--seeds", c.seeds, "number of seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--seed-start", c.seed_start, "first seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--days", c.days, "horizon in days")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "parallel seeds (0 = all cores)")->check(CLI::NonNegativeNumber);
  if (with_out) cmd->add_option("--out", c.out, "output directory");
}

// flags > env > file
RunConfig resolve(const Common& c) {
  RunConfig cfg = load_run_config(c.config, process_environment());
  if (c.seeds > 0 || c.seed_start >= 0) {
    const std::uint64_t first = c.seed_start >= 0 ? static_cast<std::uint64_t>(c.seed_start)
                                                  : (cfg.seeds.empty() ? 0 : cfg.seeds.front());
    cfg.seeds = seed_range(first, c.seeds > 0 ? c.seeds : static_cast<int>(cfg.seeds.size()));
  }
  if (c.days > 0) cfg.horizon_days = c.days;
  if (c.jobs >= 0) cfg.jobs = c.jobs;
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.validate();
  return cfg;
}

MultiSeedOptions options(const RunConfig& cfg, bool keep_records = false) {
  MultiSeedOptions o;
  o.horizon_days = cfg.horizon_days;
  o.jobs = cfg.jobs;
  o.keep_records = keep_records;
  return o;
}

std::string timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string metadata(const std::string& what) { return what + " generated=" + timestamp(); }

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    if (s == "none") return -1.0;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("bad number '" + s + "' in '" + text + "'");
    return v;
  };
  if (std::count(text.begin(), text.end(), ':') == 2) {
    auto a = text.find(':'), b = text.rfind(':');
    const double lo = number(text.substr(0, a)), step = number(text.substr(a + 1, b - a - 1)),
                 hi = number(text.substr(b + 1));
    if (!(step > 0) || hi < lo) throw UsageError("range must be lo:step:hi with step > 0");
    for (int k = 0; lo + k * step <= hi + step * 1e-9; ++k) out.push_back(lo + k * step);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(number(item));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

void print_summary(const std::vector<ConditionResult>& rows, const std::vector<std::string>& metrics) {
  std::printf("%-22s", "condition");
  for (const auto& m : metrics) std::printf(" %22s", m.c_str());
  std::printf("\n");
  for (const auto& r : rows) {
    std::printf("%-22s", r.name.c_str());
    for (const auto& m : metrics) std::printf(" %13.3f (%6.2f)", r.stats.mean(m), std::sqrt(r.stats.variance(m)));
    std::printf("\n");
  }
}

void write_conditions(const RunConfig& cfg, const std::vector<ConditionResult>& rows, const std::string& what) {
  auto tidy = open_out(fs::path(cfg.out_dir) / "tidy.csv");
  write_tidy_csv(tidy, rows, metadata(what));
  auto summary = open_out(fs::path(cfg.out_dir) / "summary.csv");
  write_summary_csv(summary, rows, metadata(what));
}

const std::vector<std::string> kShownMetrics{"peak_infected", "cumulative_deaths", "cumulative_infections",
                                             "economic_cost", "total_reward"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based pandemic simulator"};
  app.require_subcommand(1);

  Common common;
  std::string policy;
  bool log_contacts = false;
  auto* run_cmd = app.add_subcommand("run", "run one policy over N seeds");
  add_common(run_cmd, common);
  run_cmd->add_option("--policy", policy, "policy name (s040, s040fi, s040gi, swe, ita, constantK)");
  run_cmd->add_flag("--log-contacts", log_contacts, "record contact pairs");

  std::string axis, levels;
  auto* sweep_cmd = app.add_subcommand("sweep", "sensitivity sweep on one axis");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--axis", axis, "spread-rate, contact-rate or gathering-size")->required();
  sweep_cmd->add_option("--levels", levels, "comma list or lo:step:hi ('none' = no gathering limit)")
      ->required();
  sweep_cmd->add_option("--policy", policy, "policy name");

  std::string presets;
  auto* matrix_cmd = app.add_subcommand("testing-matrix", "compare the testing/tracing presets");
  add_common(matrix_cmd, common);
  matrix_cmd->add_option("--presets", presets, "comma list (default: all ten)");
  matrix_cmd->add_option("--policy", policy, "policy name (default constant0)");

  std::string grid = "0.01:0.005:0.03";
  double target_days = 30.0;
  auto* cal_cmd = app.add_subcommand("calibrate", "grid search on the spread-rate mean");
  add_common(cal_cmd, common);
  cal_cmd->add_option("--grid", grid, "comma list or lo:step:hi");
  cal_cmd->add_option("--target-days", target_days, "target time-to-peak deaths");

  std::string checkpoint = "policy.ckpt";
  std::string curve;
  long steps = -1;
  long long train_seed = 0;
  int action_period = -1;
  auto* train_cmd = app.add_subcommand("train", "train the discrete SAC policy");
  train_cmd->add_option("--config", common.config, "preset or config file");
  train_cmd->add_option("--steps", steps, "environment steps")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train_seed, "training seed")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--checkpoint", checkpoint, "where to write the policy");
  train_cmd->add_option("--curve", curve, "training curve CSV");
  train_cmd->add_option("--action-period", action_period, "days per action")->check(CLI::PositiveNumber);
  train_cmd->add_option("--days", common.days, "episode length")->check(CLI::PositiveNumber);

  std::string population;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint against the benchmarks");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--checkpoint", checkpoint, "policy checkpoint")->required();
  eval_cmd->add_option("--action-period", action_period, "days per action (1, 3, 7)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--population", population, "1k or 10k")->check(CLI::IsMember({"1k", "10k"}));

  std::vector<int> stages{0, 4};
  long long conn_seed = 0;
  auto* conn_cmd = app.add_subcommand("connectivity", "daily contact-graph components");
  add_common(conn_cmd, common);
  conn_cmd->add_option("--stages", stages, "constant stages to compare");
  conn_cmd->add_option("--seed", conn_seed, "seed")->check(CLI::NonNegativeNumber);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t capacity = 64;
  auto* serve_cmd = app.add_subcommand("serve", "start the HTTP session service");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--capacity", capacity, "maximum live sessions")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) {
      RunConfig cfg = resolve(common);
      if (!policy.empty()) cfg.policy = policy;
      if (log_contacts) cfg.sim.log_contacts = true;
      auto result = multi_seed(cfg.sim, policy_factory(cfg.policy), cfg.seeds, options(cfg, true), cfg.policy);
      for (const auto& r : result.runs) {
        auto out = open_out(fs::path(cfg.out_dir) / (cfg.policy + "_seed" + std::to_string(r.seed) + ".csv"));
        write_trajectory_csv(out, r.records, metadata("policy=" + cfg.policy + " seed=" + std::to_string(r.seed)));
        for (const auto& w : r.warnings) std::cerr << "seed " << r.seed << ": " << w << '\n';
      }
      write_conditions(cfg, {result}, "run policy=" + cfg.policy);
      auto daily = open_out(fs::path(cfg.out_dir) / "daily_summary.csv");
      write_daily_summary_csv(daily, result.stats, metadata("run policy=" + cfg.policy));
      print_summary({result}, kShownMetrics);
    } else if (*sweep_cmd) {
      RunConfig cfg = resolve(common);
      if (!policy.empty()) cfg.policy = policy;
      auto rows = sensitivity_sweep(cfg.sim, sweep_axis_from_string(axis), parse_levels(levels), cfg.seeds,
                                    policy_factory(cfg.policy), options(cfg));
      write_conditions(cfg, rows, "sweep axis=" + axis + " policy=" + cfg.policy);
      print_summary(rows, kShownMetrics);
    } else if (*matrix_cmd) {
      RunConfig cfg = resolve(common);
      std::vector<TracingStrategy> chosen;
      if (presets.empty()) {
        chosen = tracing_presets();
      } else {
        std::stringstream ss(presets);
        for (std::string item; std::getline(ss, item, ',');) chosen.push_back(tracing_preset(item));
      }
      const std::string p = policy.empty() ? std::string("constant0") : policy;
      auto rows = testing_matrix(cfg.sim, chosen, cfg.seeds, policy_factory(p), options(cfg));
      write_conditions(cfg, rows, "testing-matrix policy=" + p);
      print_summary(rows, {"cumulative_infections", "cumulative_deaths", "peak_day", "duration_days"});
    } else if (*cal_cmd) {
      RunConfig cfg = resolve(common);
      auto result = calibrate_spread_rate(cfg.sim, parse_levels(grid), target_days, cfg.seeds, options(cfg));
      std::printf("spread_rate_mean,mean_time_to_peak_deaths\n");
      for (auto [mean, days] : result.table) std::printf("%s,%s\n", format_number(mean).c_str(), format_number(days).c_str());
      std::printf("chosen %s\n", format_number(result.chosen).c_str());
    } else if (*train_cmd) {
      RunConfig cfg = load_run_config(common.config, process_environment());
      if (steps > 0) cfg.sac.total_steps = steps;
      if (action_period > 0) cfg.action_period_days = action_period;
      if (common.days > 0) cfg.horizon_days = common.days;
      cfg.validate();
      EnvConfig env{cfg.sim, cfg.horizon_days, cfg.action_period_days};
      std::vector<TrainLogRow> rows;
      auto result = sac_train(env, cfg.sac, static_cast<std::uint64_t>(train_seed), [&](const TrainLogRow& r) {
        rows.push_back(r);
        if (r.episode % 10 == 0)
          std::fprintf(stderr, "step %ld episode %d return %.3f\n", r.step, r.episode, r.episode_return);
      });
      result.policy.save(checkpoint);
      if (!curve.empty()) {
        auto out = open_out(curve);
        write_training_curve_csv(out, rows, metadata("train seed=" + std::to_string(train_seed)));
      }
      std::printf("trained %ld steps over %d episodes, checkpoint %s\n", result.steps, result.episodes,
                  checkpoint.c_str());
    } else if (*eval_cmd) {
      RunConfig cfg = resolve(common);
      if (!population.empty()) {
        cfg.sim.population = population == "10k" ? PopulationConfig::town_10k() : PopulationConfig::town_1k();
        cfg.sim.reward.c_max = 0;  // follow the hospital size
      }
      if (action_period > 0) cfg.action_period_days = action_period;
      const PolicyParams params = PolicyParams::load(checkpoint);
      EnvConfig env{cfg.sim, cfg.horizon_days, cfg.action_period_days};
      struct Row {
        std::string name;
        Welford returns;
      };
      std::vector<Row> rows;
      Row learned{"learned", {}};
      for (double r : evaluate_policy(env, params, cfg.seeds)) learned.returns.add(r);
      rows.push_back(learned);
      Row random{"random", {}};
      for (double r : evaluate_random(env, cfg.seeds, 7)) random.returns.add(r);
      rows.push_back(random);
      std::vector<std::string> names{"constant0"};
      for (const auto& n : benchmark_policy_names()) names.push_back(n);
      for (const auto& n : names) {
        auto res = multi_seed(cfg.sim, policy_factory(n), cfg.seeds, options(cfg), n);
        rows.push_back({n, res.stats.metrics.at("total_reward")});
      }
      const std::string label = "eval population=" + (population.empty() ? cfg.preset : population) +
                                " action_period=" + std::to_string(cfg.action_period_days);
      auto out = open_out(fs::path(cfg.out_dir) / "eval.csv");
      out << "# " << metadata(label) << "\npolicy,mean_return,variance,n\n";
      std::printf("%-12s %12s %10s\n", "policy", "mean_return", "sd");
      for (const auto& r : rows) {
        out << r.name << ',' << format_number(r.returns.mean()) << ',' << format_number(r.returns.variance()) << ','
            << r.returns.count() << '\n';
        std::printf("%-12s %12.3f %10.3f\n", r.name.c_str(), r.returns.mean(), std::sqrt(r.returns.variance()));
      }
    } else if (*conn_cmd) {
      RunConfig cfg = resolve(common);
      cfg.sim.log_contacts = true;
      auto out = open_out(fs::path(cfg.out_dir) / "connectivity.csv");
      out << "# " << metadata("connectivity seed=" + std::to_string(conn_seed)) << "\nstage,day,edges,components\n";
      for (int stage : stages) {
        auto p = make_heuristic_policy("constant" + std::to_string(stage));
        auto t = run(cfg.sim, *p, cfg.horizon_days, static_cast<std::uint64_t>(conn_seed));
        auto series = connectivity_series(t.contact_log, cfg.sim.population.size);
        Welford comps;
        for (const auto& g : series) {
          out << stage << ',' << g.day << ',' << g.edges << ',' << g.components << '\n';
          comps.add(static_cast<double>(g.components));
        }
        const auto w = weekend_local_maxima(series);
        std::printf("stage %d: mean components %.2f, weekend maxima %d/%d weeks\n", stage, comps.mean(), w.local_max,
                    w.weeks);
      }
    } else if (*serve_cmd) {
      SessionManager sessions(capacity);
      std::printf("listening on http://%s:%d/api/v1\n", host.c_str(), port);
      std::fflush(stdout);
      serve(host, port, sessions);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
