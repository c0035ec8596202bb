#include "pansim/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "pansim/analysis.hpp"

extern char** environ;

namespace pansim {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Walks one JSON object, complaining about any key nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + join(path_, key) + "'");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!it->is_boolean()) throw ConfigError("expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!it->is_number_integer()) throw ConfigError("expected an integer");
        if (std::is_unsigned_v<T> && it->template get<std::int64_t>() < 0)
          throw ConfigError("expected a non-negative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!it->is_number()) throw ConfigError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!it->is_string()) throw ConfigError("expected a string");
      }
      out = it->template get<T>();
    } catch (const std::exception& e) {
      throw ConfigError("config key '" + join(path_, key) + "': " + e.what());
    }
  }

  // Nested object handled by `fn(sub_json, sub_path)`.
  void sub(const std::string& key, const std::function<void(const json&, const std::string&)>& fn) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it != j_.end()) fn(*it, join(path_, key));
  }

  std::string where() const { return path_.empty() ? "config" : "config key '" + path_ + "'"; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string kind_key(LocationKind k) { return std::string(to_string(k)); }

json triangular_json(const Triangular& t) { return json::array({t.min, t.mode, t.max}); }

void read_triangular(const json& j, const std::string& path, Triangular& t) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ConfigError("config key '" + path + "': expected [min, mode, max]");
  t = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void read_age_vector(const json& j, const std::string& path, AgeVector& v) {
  if (!j.is_array() || j.size() != v.size())
    throw ConfigError("config key '" + path + "': expected " + std::to_string(v.size()) + " numbers");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("config key '" + path + "': expected numbers");
    v[i] = j[i].get<double>();
  }
}

// Weekly hours as seven entries, one per weekday from Monday: [start, end)
// or null when closed.
json open_hours_json(const OpenHours& h) {
  json days = json::array();
  for (int d = 0; d < 7; ++d) {
    int start = -1, end = -1;
    for (int hour = 0; hour < 24; ++hour) {
      if (h.is_open(d, hour)) {
        if (start < 0) start = hour;
        end = hour + 1;
      }
    }
    days.push_back(start < 0 ? json(nullptr) : json::array({start, end}));
  }
  return days;
}

void read_open_hours(const json& j, const std::string& path, OpenHours& out) {
  if (!j.is_array() || j.size() != 7)
    throw ConfigError("config key '" + path + "': expected 7 weekday entries");
  OpenHours h;
  for (int d = 0; d < 7; ++d) {
    if (j[d].is_null()) continue;
    if (!j[d].is_array() || j[d].size() != 2 || !j[d][0].is_number_integer() ||
        !j[d][1].is_number_integer())
      throw ConfigError("config key '" + path + "': expected [start, end] or null");
    const int start = j[d][0].get<int>(), end = j[d][1].get<int>();
    if (start < 0 || end > 24 || start > end)
      throw ConfigError("config key '" + path + "': hours must satisfy 0 <= start <= end <= 24");
    for (int hour = start; hour < end; ++hour) h.set(d, hour, true);
  }
  out = h;
}

json location_json(const LocationTypeConfig& l) {
  return {{"count", l.count},
          {"capacity",
           {{"worker", l.capacity.worker}, {"visitor", l.capacity.visitor}, {"patient", l.capacity.patient}}},
          {"contact_rates",
           {{"worker_worker", l.contact_rates.worker_worker},
            {"worker_visitor", l.contact_rates.worker_visitor},
            {"visitor_visitor", l.contact_rates.visitor_visitor}}},
          {"min_contacts",
           {{"worker_worker", l.min_contacts.worker_worker},
            {"worker_visitor", l.min_contacts.worker_visitor},
            {"visitor_visitor", l.min_contacts.visitor_visitor}}},
          {"open_hours", open_hours_json(l.open_hours)},
          {"shift", json::array({l.shift_start, l.shift_end})}};
}

void read_location(const json& j, const std::string& path, LocationTypeConfig& l) {
  Reader r(j, path);
  r.get("count", l.count);
  r.sub("capacity", [&](const json& s, const std::string& p) {
    Reader c(s, p);
    c.get("worker", l.capacity.worker);
    c.get("visitor", l.capacity.visitor);
    c.get("patient", l.capacity.patient);
  });
  r.sub("contact_rates", [&](const json& s, const std::string& p) {
    Reader c(s, p);
    c.get("worker_worker", l.contact_rates.worker_worker);
    c.get("worker_visitor", l.contact_rates.worker_visitor);
    c.get("visitor_visitor", l.contact_rates.visitor_visitor);
  });
  r.sub("min_contacts", [&](const json& s, const std::string& p) {
    Reader c(s, p);
    c.get("worker_worker", l.min_contacts.worker_worker);
    c.get("worker_visitor", l.min_contacts.worker_visitor);
    c.get("visitor_visitor", l.min_contacts.visitor_visitor);
  });
  r.sub("open_hours", [&](const json& s, const std::string& p) { read_open_hours(s, p, l.open_hours); });
  r.sub("shift", [&](const json& s, const std::string& p) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number_integer() || !s[1].is_number_integer())
      throw ConfigError("config key '" + p + "': expected [start, end]");
    l.shift_start = s[0].get<int>();
    l.shift_end = s[1].get<int>();
  });
}

json population_json(const PopulationConfig& c) {
  json ages = json::array();
  for (const auto& b : c.age_histogram)
    ages.push_back({{"min_age", b.min_age}, {"max_age", b.max_age}, {"fraction", b.fraction}});
  json locs = json::object();
  for (const auto& l : c.locations) locs[kind_key(l.kind)] = location_json(l);
  return {{"size", c.size},
          {"age_histogram", ages},
          {"retiree_home_fraction", c.retiree_home_fraction},
          {"high_risk_fraction", c.high_risk_fraction},
          {"compliance", c.compliance},
          {"spread_rate_mean", c.spread_rate_mean},
          {"spread_rate_sd", c.spread_rate_sd},
          {"locations", locs},
          {"social_events_per_month", c.social_events_per_month},
          {"social_event_start_hour", c.social_event_start_hour},
          {"social_event_hours", c.social_event_hours},
          {"social_event_invitees", c.social_event_invitees}};
}

void read_population(const json& j, const std::string& path, PopulationConfig& c) {
  Reader r(j, path);
  r.get("size", c.size);
  r.sub("age_histogram", [&](const json& s, const std::string& p) {
    if (!s.is_array()) throw ConfigError("config key '" + p + "': expected a list");
    std::vector<AgeBucket> buckets;
    for (std::size_t i = 0; i < s.size(); ++i) {
      AgeBucket b;
      Reader br(s[i], p + "[" + std::to_string(i) + "]");
      br.get("min_age", b.min_age);
      br.get("max_age", b.max_age);
      br.get("fraction", b.fraction);
      buckets.push_back(b);
    }
    c.age_histogram = std::move(buckets);
  });
  r.get("retiree_home_fraction", c.retiree_home_fraction);
  r.get("high_risk_fraction", c.high_risk_fraction);
  r.get("compliance", c.compliance);
  r.get("spread_rate_mean", c.spread_rate_mean);
  r.get("spread_rate_sd", c.spread_rate_sd);
  r.sub("locations", [&](const json& s, const std::string& p) {
    if (!s.is_object()) throw ConfigError("config key '" + p + "': expected an object");
    for (const auto& [key, value] : s.items()) {
      LocationKind kind;
      try {
        kind = location_kind_from_string(key);
      } catch (const ConfigError&) {
        throw ConfigError("unknown config key '" + join(p, key) + "'");
      }
      LocationTypeConfig* l = c.find(kind);
      if (!l) {
        c.locations.push_back({});
        c.locations.back().kind = kind;
        l = &c.locations.back();
      }
      read_location(value, join(p, key), *l);
    }
  });
  r.get("social_events_per_month", c.social_events_per_month);
  r.get("social_event_start_hour", c.social_event_start_hour);
  r.get("social_event_hours", c.social_event_hours);
  r.get("social_event_invitees", c.social_event_invitees);
}

json seir_json(const SeirParams& s) {
  return {{"latent_days", triangular_json(s.latent_days)},
          {"symptomatic_fraction", s.symptomatic_fraction},
          {"presymptomatic_days", s.presymptomatic_days},
          {"preasymptomatic_days", s.preasymptomatic_days},
          {"symptomatic_recovery_days", triangular_json(s.symptomatic_recovery_days)},
          {"asymptomatic_recovery_days", triangular_json(s.asymptomatic_recovery_days)},
          {"hospital_recovery_days", triangular_json(s.hospital_recovery_days)},
          {"needs_hospital_recovery_rate", s.needs_hospital_recovery_rate},
          {"yhr_overall_pct", s.yhr_overall_pct},
          {"yhr_low_risk_pct", s.yhr_low_risk_pct},
          {"yhr_high_risk_pct", s.yhr_high_risk_pct},
          {"hfr_pct", s.hfr_pct},
          {"symptom_to_hospital_rate", s.symptom_to_hospital_rate},
          {"hospital_death_days", triangular_json(s.hospital_death_days)},
          {"unserved_death_prob", s.unserved_death_prob},
          {"unserved_death_rate", s.unserved_death_rate}};
}

void read_seir(const json& j, const std::string& path, SeirParams& s) {
  Reader r(j, path);
  auto tri = [&](const char* key, Triangular& t) {
    r.sub(key, [&](const json& v, const std::string& p) { read_triangular(v, p, t); });
  };
  auto vec = [&](const char* key, AgeVector& v) {
    r.sub(key, [&](const json& x, const std::string& p) { read_age_vector(x, p, v); });
  };
  tri("latent_days", s.latent_days);
  r.get("symptomatic_fraction", s.symptomatic_fraction);
  r.get("presymptomatic_days", s.presymptomatic_days);
  r.get("preasymptomatic_days", s.preasymptomatic_days);
  tri("symptomatic_recovery_days", s.symptomatic_recovery_days);
  tri("asymptomatic_recovery_days", s.asymptomatic_recovery_days);
  tri("hospital_recovery_days", s.hospital_recovery_days);
  r.get("needs_hospital_recovery_rate", s.needs_hospital_recovery_rate);
  vec("yhr_overall_pct", s.yhr_overall_pct);
  vec("yhr_low_risk_pct", s.yhr_low_risk_pct);
  vec("yhr_high_risk_pct", s.yhr_high_risk_pct);
  vec("hfr_pct", s.hfr_pct);
  r.get("symptom_to_hospital_rate", s.symptom_to_hospital_rate);
  tri("hospital_death_days", s.hospital_death_days);
  vec("unserved_death_prob", s.unserved_death_prob);
  r.get("unserved_death_rate", s.unserved_death_rate);
}

json testing_json(const TestingConfig& t) {
  return {{"random_rate", t.random_rate},
          {"symptomatic_rate", t.symptomatic_rate},
          {"critical_rate", t.critical_rate},
          {"false_positive", t.false_positive},
          {"false_negative", t.false_negative},
          {"retest_positive_rate", t.retest_positive_rate},
          {"result_delay_days", t.result_delay_days}};
}

void read_testing(const json& j, const std::string& path, TestingConfig& t) {
  Reader r(j, path);
  r.get("random_rate", t.random_rate);
  r.get("symptomatic_rate", t.symptomatic_rate);
  r.get("critical_rate", t.critical_rate);
  r.get("false_positive", t.false_positive);
  r.get("false_negative", t.false_negative);
  r.get("retest_positive_rate", t.retest_positive_rate);
  r.get("result_delay_days", t.result_delay_days);
}

json tracing_json(const TracingConfig& t) {
  return {{"horizon_days", t.horizon_days},
          {"stay_home_if_sick", t.stay_home_if_sick},
          {"quarantine_contacts", t.quarantine_contacts},
          {"quarantine_days", t.quarantine_days},
          {"trace_miss_probability", t.trace_miss_probability}};
}

void read_tracing(const json& j, const std::string& path, TracingConfig& t) {
  Reader r(j, path);
  r.get("horizon_days", t.horizon_days);
  r.get("stay_home_if_sick", t.stay_home_if_sick);
  r.get("quarantine_contacts", t.quarantine_contacts);
  r.get("quarantine_days", t.quarantine_days);
  r.get("trace_miss_probability", t.trace_miss_probability);
}

json reward_json(const RewardParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"p", p.p}, {"shaping", p.shaping}, {"c_max", p.c_max}};
}

void read_reward(const json& j, const std::string& path, RewardParams& p) {
  Reader r(j, path);
  r.get("a", p.a);
  r.get("b", p.b);
  r.get("p", p.p);
  r.get("shaping", p.shaping);
  r.get("c_max", p.c_max);
}

json sac_json(const SacHyperparams& h) {
  return {{"critic_lr", h.critic_lr},
          {"actor_lr", h.actor_lr},
          {"entropy_alpha", h.entropy_alpha},
          {"target_tau", h.target_tau},
          {"discount", h.discount},
          {"hidden_units", h.hidden_units},
          {"hidden_layers", h.hidden_layers},
          {"replay_capacity", h.replay_capacity},
          {"batch_size", h.batch_size},
          {"total_steps", h.total_steps},
          {"warmup_steps", h.warmup_steps},
          {"updates_per_step", h.updates_per_step}};
}

void read_sac(const json& j, const std::string& path, SacHyperparams& h) {
  Reader r(j, path);
  r.get("critic_lr", h.critic_lr);
  r.get("actor_lr", h.actor_lr);
  r.get("entropy_alpha", h.entropy_alpha);
  r.get("target_tau", h.target_tau);
  r.get("discount", h.discount);
  r.get("hidden_units", h.hidden_units);
  r.get("hidden_layers", h.hidden_layers);
  r.get("replay_capacity", h.replay_capacity);
  r.get("batch_size", h.batch_size);
  r.get("total_steps", h.total_steps);
  r.get("warmup_steps", h.warmup_steps);
  r.get("updates_per_step", h.updates_per_step);
}

void read_sim_keys(Reader& r, SimConfig& sim) {
  r.sub("population", [&](const json& s, const std::string& p) { read_population(s, p, sim.population); });
  r.sub("seir", [&](const json& s, const std::string& p) { read_seir(s, p, sim.seir); });
  r.sub("strategy", [&](const json& s, const std::string& p) {
    if (!s.is_string()) throw ConfigError("config key '" + p + "': expected a preset name");
    try {
      auto preset = tracing_preset(s.get<std::string>());
      sim.testing = preset.testing;
      sim.tracing = preset.tracing;
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + p + "': " + e.what());
    }
  });
  r.sub("testing", [&](const json& s, const std::string& p) { read_testing(s, p, sim.testing); });
  r.sub("tracing", [&](const json& s, const std::string& p) { read_tracing(s, p, sim.tracing); });
  r.sub("stage_table", [&](const json& s, const std::string& p) {
    if (!s.is_string()) throw ConfigError("config key '" + p + "': expected a table name");
    try {
      sim.stage_table = stage_table_kind_from_string(s.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError("config key '" + p + "': " + e.what());
    }
  });
  r.sub("reward", [&](const json& s, const std::string& p) { read_reward(s, p, sim.reward); });
  r.get("seed_cohort", sim.seed_cohort);
  r.get("activation_threshold", sim.activation_threshold);
  r.get("log_contacts", sim.log_contacts);
  r.sub("gathering_limit", [&](const json& s, const std::string& p) {
    if (s.is_null()) {
      sim.gathering_limit_override.reset();
    } else if (s.is_number_integer() && s.get<int>() >= 0) {
      sim.gathering_limit_override = s.get<int>();
    } else {
      throw ConfigError("config key '" + p + "': expected a non-negative integer or null");
    }
  });
}

void sim_keys_json(json& j, const SimConfig& sim) {
  j["population"] = population_json(sim.population);
  j["seir"] = seir_json(sim.seir);
  j["testing"] = testing_json(sim.testing);
  j["tracing"] = tracing_json(sim.tracing);
  j["stage_table"] = std::string(to_string(sim.stage_table));
  j["reward"] = reward_json(sim.reward);
  j["seed_cohort"] = sim.seed_cohort;
  j["activation_threshold"] = sim.activation_threshold;
  j["log_contacts"] = sim.log_contacts;
  j["gathering_limit"] = sim.gathering_limit_override ? json(*sim.gathering_limit_override) : json(nullptr);
}

bool contiguous(const std::vector<std::uint64_t>& seeds) {
  for (std::size_t i = 1; i < seeds.size(); ++i)
    if (seeds[i] != seeds[i - 1] + 1) return false;
  return !seeds.empty();
}

std::string env_name(const std::string& path) {
  std::string out = "PANDEMIC_";
  for (char c : path) out += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : '_';
  return out;
}

void collect_leaves(const json& j, const std::string& path, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) collect_leaves(v, join(path, k), out);
  } else if (!j.is_array()) {
    out[env_name(path)] = path;
  }
}

json parse_scalar(const json& current, const std::string& text, const std::string& var) {
  try {
    if (current.is_boolean()) {
      if (text == "1" || text == "true") return true;
      if (text == "0" || text == "false") return false;
      throw ConfigError("expected true/false");
    }
    if (current.is_string()) return text;
    std::size_t used = 0;
    if (current.is_number_integer() || current.is_number_unsigned()) {
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw ConfigError("expected an integer");
      return v;
    }
    if (current.is_number_float()) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw ConfigError("expected a number");
      return v;
    }
    if (current.is_null()) {
      if (text.empty() || text == "null" || text == "none") return nullptr;
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw ConfigError("expected an integer or none");
      return v;
    }
  } catch (const ConfigError& e) {
    throw ConfigError(var + ": " + e.what());
  } catch (const std::exception&) {
    throw ConfigError(var + ": cannot parse '" + text + "'");
  }
  throw ConfigError(var + ": not a scalar key");
}

}  // namespace

RunConfig::RunConfig() : seeds(seed_range(0, 30)) {}

void RunConfig::validate() const {
  sim.validate();
  sac.validate();
  if (horizon_days < 1) throw ConfigError("horizon_days must be >= 1");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (action_period_days < 1) throw ConfigError("action_period_days must be >= 1");
}

RunConfig preset_run_config(const std::string& name) {
  RunConfig cfg;
  if (name == "town1k" || name == "1k") {
    cfg.preset = "town1k";
    cfg.sim.population = PopulationConfig::town_1k();
  } else if (name == "town10k" || name == "10k") {
    cfg.preset = "town10k";
    cfg.sim.population = PopulationConfig::town_10k();
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected town1k or town10k)");
  }
  return cfg;
}

json sim_to_json(const SimConfig& sim) {
  json j = json::object();
  sim_keys_json(j, sim);
  return j;
}

void apply_sim_json(SimConfig& sim, const json& j, const std::string& path) {
  Reader r(j, path);
  read_sim_keys(r, sim);
}

json to_json(const RunConfig& cfg) {
  json j = json::object();
  j["preset"] = cfg.preset;
  sim_keys_json(j, cfg.sim);
  j["policy"] = cfg.policy;
  j["horizon_days"] = cfg.horizon_days;
  if (contiguous(cfg.seeds))
    j["seeds"] = {{"first", cfg.seeds.front()}, {"count", cfg.seeds.size()}};
  else
    j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  j["jobs"] = cfg.jobs;
  j["action_period_days"] = cfg.action_period_days;
  j["sac"] = sac_json(cfg.sac);
  return j;
}

void apply_json(RunConfig& cfg, const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  // A preset swaps the whole sim section, so it has to come first.
  if (auto it = j.find("preset"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("config key '" + join(path, "preset") + "': expected a string");
    RunConfig fresh = preset_run_config(it->get<std::string>());
    cfg.preset = fresh.preset;
    cfg.sim = fresh.sim;
  }
  Reader r(j, path);
  std::string ignored;
  r.get("preset", ignored);
  read_sim_keys(r, cfg.sim);
  r.get("policy", cfg.policy);
  r.get("horizon_days", cfg.horizon_days);
  r.sub("seeds", [&](const json& s, const std::string& p) {
    if (s.is_array()) {
      std::vector<std::uint64_t> seeds;
      for (const auto& v : s) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
          throw ConfigError("config key '" + p + "': seeds must be non-negative integers");
        seeds.push_back(v.get<std::uint64_t>());
      }
      cfg.seeds = std::move(seeds);
      return;
    }
    Reader sr(s, p);
    std::uint64_t first = cfg.seeds.empty() ? 0 : cfg.seeds.front();
    int count = static_cast<int>(cfg.seeds.size());
    sr.get("first", first);
    sr.get("count", count);
    cfg.seeds = seed_range(first, count);
  });
  r.get("out_dir", cfg.out_dir);
  r.get("jobs", cfg.jobs);
  r.get("action_period_days", cfg.action_period_days);
  r.sub("sac", [&](const json& s, const std::string& p) { read_sac(s, p, cfg.sac); });
}

std::map<std::string, std::string> env_override_names(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  collect_leaves(to_json(cfg), "", out);
  out.erase("PANDEMIC_PRESET");
  return out;
}

void apply_env_overrides(RunConfig& cfg, const std::map<std::string, std::string>& env) {
  const auto names = env_override_names(cfg);
  json patch = json::object();
  const json current = to_json(cfg);
  for (const auto& [var, value] : env) {
    if (var.rfind("PANDEMIC_", 0) != 0) continue;
    auto it = names.find(var);
    if (it == names.end()) throw ConfigError("unknown environment override " + var);
    const json::json_pointer ptr("/" + [&] {
      std::string p = it->second;
      for (char& c : p)
        if (c == '.') c = '/';
      return p;
    }());
    patch[ptr] = parse_scalar(current[ptr], value, var);
  }
  if (!patch.empty()) apply_json(cfg, patch);
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string kv(*e);
    auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    if (kv.rfind("PANDEMIC_", 0) == 0) out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

json parse_commented_json(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& source, const std::map<std::string, std::string>& env) {
  RunConfig cfg;
  if (source == "town1k" || source == "town10k" || source == "1k" || source == "10k") {
    cfg = preset_run_config(source);
  } else {
    std::ifstream in(source);
    if (!in) throw ConfigError("cannot read config file '" + source + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    apply_json(cfg, parse_commented_json(buf.str()));
  }
  apply_env_overrides(cfg, env);
  cfg.validate();
  return cfg;
}

}  // namespace pansim
