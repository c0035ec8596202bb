#include "pansim/service.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "pansim/config.hpp"
#include "pansim/heuristics.hpp"

// after Eigen: resolv.h defines _res
#include <httplib.h>

namespace pansim {

using nlohmann::json;

std::string to_string(SessionMode m) {
  return m == SessionMode::constrained ? "constrained" : "free-stage";
}

std::string to_string(SessionStatus s) {
  switch (s) {
    case SessionStatus::awaiting_action: return "awaiting-action";
    case SessionStatus::running: return "running";
    case SessionStatus::finished: return "finished";
  }
  return "?";
}

namespace {

template <typename T>
T field(const json& body, const char* key, T fallback) {
  auto it = body.find(key);
  if (it == body.end()) return fallback;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw std::invalid_argument("expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw std::invalid_argument("expected an integer");
      if (std::is_unsigned_v<T> && it->template get<std::int64_t>() < 0)
        throw std::invalid_argument("expected a non-negative integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw std::invalid_argument("expected a string");
    }
    return it->template get<T>();
  } catch (const std::exception& e) {
    throw ServiceError(400, std::string("field '") + key + "': " + e.what());
  }
}

json perceived_json(const PerceivedSummary& p) {
  return {{"infected", p.infected}, {"critical", p.critical}, {"dead", p.dead}, {"recovered", p.recovered}};
}

json error_json(int status, const std::string& message) {
  return {{"error", {{"status", status}, {"message", message}}}};
}

}  // namespace

SessionOptions parse_session_request(const json& body) {
  if (!body.is_object()) throw ServiceError(400, "request body must be a JSON object");
  static const std::set<std::string> known{"seed",   "mode",  "action_period_days", "horizon_days",
                                           "ghost",  "preset", "config"};
  for (const auto& [key, value] : body.items())
    if (!known.count(key)) throw ServiceError(400, "unknown field '" + key + "'");

  SessionOptions o;
  const std::string preset = field<std::string>(body, "preset", "town1k");
  try {
    o.sim = preset_run_config(preset).sim;
  } catch (const ConfigError& e) {
    throw ServiceError(400, std::string("field 'preset': ") + e.what());
  }
  o.seed = field<std::uint64_t>(body, "seed", 0);
  const std::string mode = field<std::string>(body, "mode", "constrained");
  if (mode == "constrained")
    o.mode = SessionMode::constrained;
  else if (mode == "free-stage" || mode == "free_stage" || mode == "free")
    o.mode = SessionMode::free_stage;
  else
    throw ServiceError(400, "field 'mode': expected 'constrained' or 'free-stage'");
  o.action_period_days = field<int>(body, "action_period_days", 1);
  o.horizon_days = field<int>(body, "horizon_days", 120);
  o.ghost = field<bool>(body, "ghost", false);
  if (o.action_period_days < 1) throw ServiceError(400, "field 'action_period_days': must be >= 1");
  if (o.horizon_days < 1) throw ServiceError(400, "field 'horizon_days': must be >= 1");
  if (auto it = body.find("config"); it != body.end()) {
    try {
      apply_sim_json(o.sim, *it, "config");
      o.sim.validate();
    } catch (const ConfigError& e) {
      throw ServiceError(400, e.what());
    }
  }
  return o;
}

json public_day_json(const DayRecord& r) {
  return {{"day", r.day},
          {"stage", r.stage},
          {"perceived", perceived_json(r.perceived)},
          {"reward", r.reward.total()},
          {"reward_terms",
           {{"health", r.reward.health}, {"economic", r.reward.economic}, {"shaping", r.reward.shaping}}}};
}

json true_day_json(const DayRecord& r) {
  json counts = json::object();
  for (int c = 0; c < kCompartmentCount; ++c)
    counts[std::string(to_string(static_cast<Compartment>(c)))] = r.true_summary[c];
  return {{"day", r.day},
          {"stage", r.stage},
          {"true_summary", counts},
          {"n_critical", r.n_critical},
          {"hospital_occupancy", r.hospital_occupancy},
          {"perceived", perceived_json(r.perceived)},
          {"reward", r.reward.total()}};
}

std::string format_sse(const SessionEvent& e) {
  std::ostringstream out;
  out << "id: " << e.id << "\nevent: " << e.type << "\ndata: " << e.data.dump() << "\n\n";
  return out.str();
}

Session::Session(std::string id, SessionOptions options)
    : id_(std::move(id)), options_(std::move(options)), sim_(options_.sim, options_.seed) {
  if (options_.ghost) {
    auto gi = make_heuristic_policy("s040gi");
    ghost_ = run(options_.sim, *gi, options_.horizon_days, options_.seed).records;
  }
}

json Session::observation_locked() const {
  const auto& beds = sim_.world().beds;
  return {{"day", sim_.calendar().day},
          {"stage", sim_.stage()},
          {"max_stage", sim_.max_stage()},
          {"perceived", perceived_json(sim_.perceived())},
          {"population", sim_.world().persons.size()},
          {"hospital_capacity", beds.capacity()}};
}

json Session::observation() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return observation_locked();
}

json Session::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  json days = json::array();
  for (const auto& r : sim_.records()) days.push_back(public_day_json(r));
  json j = {{"id", id_},
            {"mode", to_string(options_.mode)},
            {"status", to_string(status_)},
            {"seed", options_.seed},
            {"action_period_days", options_.action_period_days},
            {"horizon_days", options_.horizon_days},
            {"observation", observation_locked()},
            {"cumulative_reward", cumulative_reward_},
            {"days", days},
            {"actions", actions_},
            {"ghost", options_.ghost}};
  if (status_ == SessionStatus::finished) {
    json truth = json::array();
    for (const auto& r : sim_.records()) truth.push_back(true_day_json(r));
    j["true_history"] = truth;
    if (options_.ghost) {
      json g = json::array();
      for (const auto& r : ghost_) g.push_back(true_day_json(r));
      j["ghost_true_history"] = g;
    }
  }
  return j;
}

void Session::push_event(std::string type, json data) {
  const std::int64_t id = events_.empty() ? 1 : events_.back().id + 1;
  events_.push_back({id, std::move(type), std::move(data)});
}

json Session::submit(int stage) {
  std::unique_lock<std::mutex> lock(mutex_);
  if (closed_) throw ServiceError(404, "session " + id_ + " no longer exists");
  if (status_ == SessionStatus::finished) throw ServiceError(409, "session has already finished");
  if (stage < 0 || stage > sim_.max_stage())
    throw ServiceError(422, "stage must lie between 0 and " + std::to_string(sim_.max_stage()));
  const int current = sim_.stage();
  if (options_.mode == SessionMode::constrained && std::abs(stage - current) > 1)
    throw ServiceError(422, "illegal stage jump from " + std::to_string(current) + " to " +
                                std::to_string(stage) +
                                ": a constrained session moves at most one stage per decision");
  status_ = SessionStatus::running;
  json days = json::array();
  double reward = 0.0;
  for (int k = 0; k < options_.action_period_days && sim_.calendar().day < options_.horizon_days; ++k) {
    const DayRecord& rec = sim_.step_day(stage);
    reward += rec.reward.total();
    json day = public_day_json(rec);
    if (options_.ghost && static_cast<std::size_t>(rec.day) < ghost_.size())
      day["ghost"] = public_day_json(ghost_[rec.day]);
    days.push_back(day);
    push_event("day", day);
  }
  cumulative_reward_ += reward;
  actions_.push_back({{"day", days.front()["day"]}, {"stage", stage}, {"reward", reward}});
  const bool done = sim_.calendar().day >= options_.horizon_days;
  status_ = done ? SessionStatus::finished : SessionStatus::awaiting_action;
  if (done) {
    json truth = json::array();
    for (const auto& r : sim_.records()) truth.push_back(true_day_json(r));
    json fin = {{"cumulative_reward", cumulative_reward_}, {"true_history", truth}};
    if (options_.ghost) {
      json g = json::array();
      double ghost_reward = 0.0;
      for (const auto& r : ghost_) {
        g.push_back(true_day_json(r));
        ghost_reward += r.reward.total();
      }
      fin["ghost_true_history"] = g;
      fin["ghost_cumulative_reward"] = ghost_reward;
    }
    push_event("finished", fin);
  }
  json out = {{"observation", observation_locked()},
              {"reward", reward},
              {"cumulative_reward", cumulative_reward_},
              {"days", days},
              {"status", to_string(status_)}};
  if (done) out["true_history"] = events_.back().data["true_history"];
  lock.unlock();
  cv_.notify_all();
  return out;
}

std::vector<SessionEvent> Session::events_after(std::int64_t last_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<SessionEvent> out;
  for (const auto& e : events_)
    if (e.id > last_id) out.push_back(e);
  return out;
}

void Session::wait_for_events(std::int64_t last_id, std::chrono::milliseconds timeout) const {
  std::unique_lock<std::mutex> lock(mutex_);
  cv_.wait_for(lock, timeout, [&] {
    return closed_ || status_ == SessionStatus::finished || (!events_.empty() && events_.back().id > last_id);
  });
}

bool Session::finished() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return status_ == SessionStatus::finished;
}

void Session::close() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool Session::closed() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return closed_;
}

std::chrono::steady_clock::time_point Session::last_access() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return last_access_;
}

void Session::touch(std::chrono::steady_clock::time_point now) {
  std::lock_guard<std::mutex> lock(mutex_);
  last_access_ = now;
}

SessionManager::SessionManager(std::size_t capacity, std::chrono::seconds idle_timeout, Clock clock)
    : capacity_(capacity), idle_timeout_(idle_timeout), clock_(std::move(clock)), salt_(std::random_device{}()) {
  salt_ = (salt_ << 32) ^ std::random_device{}();
}

std::string SessionManager::new_id() {
  // splitmix64 of a counter, salted per process
  std::uint64_t z = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
  return buf;
}

void SessionManager::expire_idle() {
  std::vector<std::shared_ptr<Session>> dropped;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto now = clock_();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (now - it->second->last_access() >= idle_timeout_) {
        dropped.push_back(it->second);
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& s : dropped) s->close();
}

std::shared_ptr<Session> SessionManager::create(const json& body) {
  SessionOptions options = parse_session_request(body);
  expire_idle();
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (sessions_.size() >= capacity_)
      throw ServiceError(429, "session capacity reached (" + std::to_string(capacity_) + ")");
    id = new_id();
  }
  std::shared_ptr<Session> s;
  try {
    s = std::make_shared<Session>(id, std::move(options));
  } catch (const ConfigError& e) {
    throw ServiceError(400, e.what());
  }
  s->touch(clock_());
  std::lock_guard<std::mutex> lock(mutex_);
  if (sessions_.size() >= capacity_)
    throw ServiceError(429, "session capacity reached (" + std::to_string(capacity_) + ")");
  sessions_[id] = s;
  return s;
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) {
  expire_idle();
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
  it->second->touch(clock_());
  return it->second;
}

void SessionManager::remove(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(404, "unknown session '" + id + "'");
    s = it->second;
    sessions_.erase(it);
  }
  s->close();
}

std::size_t SessionManager::size() {
  std::lock_guard<std::mutex> lock(mutex_);
  return sessions_.size();
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    send_json(res, e.status(), error_json(e.status(), e.what()));
  } catch (const json::exception& e) {
    send_json(res, 400, error_json(400, std::string("malformed JSON: ") + e.what()));
  } catch (const std::exception& e) {
    send_json(res, 500, error_json(500, e.what()));
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, std::string("malformed JSON: ") + e.what());
  }
}

std::int64_t last_event_id(const httplib::Request& req) {
  std::string v = req.get_header_value("Last-Event-ID");
  if (v.empty() && req.has_param("last_event_id")) v = req.get_param_value("last_event_id");
  if (v.empty()) return 0;
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw ServiceError(400, "Last-Event-ID must be an integer");
  }
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  for (const std::string prefix : {"/api/v1", "/api"}) {
    const std::string base = prefix + "/sessions";
    const std::string one = base + R"(/([0-9a-f]+))";

    server.Post(base, [&sessions](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = sessions.create(parse_body(req));
        send_json(res, 201, {{"id", s->id()}, {"observation", s->observation()}, {"session", s->snapshot()}});
      });
    });

    server.Get(one, [&sessions](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, sessions.get(req.matches[1])->snapshot()); });
    });

    server.Delete(one, [&sessions](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        sessions.remove(req.matches[1]);
        res.status = 204;
      });
    });

    server.Post(one + "/actions", [&sessions](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto s = sessions.get(req.matches[1]);
        json body = parse_body(req);
        if (!body.is_object() || !body.contains("stage") || !body["stage"].is_number_integer())
          throw ServiceError(400, "field 'stage': expected an integer");
        send_json(res, 200, s->submit(body["stage"].get<int>()));
      });
    });

    server.Get(one + "/events", [&sessions](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto session = sessions.get(req.matches[1]);
        auto cursor = std::make_shared<std::int64_t>(last_event_id(req));
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider(
            "text/event-stream", [session, cursor](std::size_t, httplib::DataSink& sink) {
              for (const auto& e : session->events_after(*cursor)) {
                const std::string text = format_sse(e);
                if (!sink.write(text.data(), text.size())) return false;
                *cursor = e.id;
                if (e.type == "finished") {
                  sink.done();
                  return true;
                }
              }
              if (session->closed() || session->finished()) {
                sink.done();
                return true;
              }
              session->wait_for_events(*cursor, std::chrono::milliseconds(1000));
              if (session->events_after(*cursor).empty() && !session->closed()) {
                static const std::string ping = ": keep-alive\n\n";
                return sink.write(ping.data(), ping.size());
              }
              return true;
            });
      });
    });
  }
}

void serve(const std::string& host, int port, SessionManager& sessions) {
  httplib::Server server;
  install_routes(server, sessions);
  if (!server.listen(host, port)) throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace pansim
