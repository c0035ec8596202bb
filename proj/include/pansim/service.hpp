#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pansim/engine.hpp"

namespace httplib {
class Server;
}

namespace pansim {

/// Carries an HTTP status for the service layer.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

enum class SessionMode { constrained, free_stage };
enum class SessionStatus { awaiting_action, running, finished };

std::string to_string(SessionMode m);
std::string to_string(SessionStatus s);

struct SessionOptions {
  SimConfig sim;
  std::uint64_t seed = 0;
  SessionMode mode = SessionMode::constrained;
  int action_period_days = 1;
  int horizon_days = 120;
  bool ghost = false;  // run S0-4-0-GI on the same seed alongside
};

// Parses a create-session body. Throws ServiceError(400) naming the field.
SessionOptions parse_session_request(const nlohmann::json& body);

/// Public (perceived) view of one day.
nlohmann::json public_day_json(const DayRecord& r);
/// Ground truth for one day; only sent once a session has finished.
nlohmann::json true_day_json(const DayRecord& r);

struct SessionEvent {
  std::int64_t id = 0;  // 1-based, strictly increasing
  std::string type;     // "day" or "finished"
  nlohmann::json data;
};

std::string format_sse(const SessionEvent& e);

class Session {
 public:
  Session(std::string id, SessionOptions options);

  const std::string& id() const { return id_; }

  nlohmann::json snapshot() const;
  nlohmann::json observation() const;
  // Advances one action period. Throws ServiceError on illegal requests.
  nlohmann::json submit(int stage);

  std::vector<SessionEvent> events_after(std::int64_t last_id) const;
  // Blocks until an event newer than `last_id` exists, the session is
  // finished or closed, or `timeout` elapses.
  void wait_for_events(std::int64_t last_id, std::chrono::milliseconds timeout) const;
  bool finished() const;
  void close();
  bool closed() const;

  std::chrono::steady_clock::time_point last_access() const;
  void touch(std::chrono::steady_clock::time_point now);

 private:
  nlohmann::json observation_locked() const;
  void push_event(std::string type, nlohmann::json data);

  std::string id_;
  SessionOptions options_;
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  Simulation sim_;
  std::vector<DayRecord> ghost_;  // full benchmark trajectory, revealed day by day
  SessionStatus status_ = SessionStatus::awaiting_action;
  double cumulative_reward_ = 0.0;
  std::vector<nlohmann::json> actions_;
  std::vector<SessionEvent> events_;
  bool closed_ = false;
  std::chrono::steady_clock::time_point last_access_;
};

class SessionManager {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionManager(std::size_t capacity = 64,
                          std::chrono::seconds idle_timeout = std::chrono::hours(1),
                          Clock clock = [] { return std::chrono::steady_clock::now(); });

  std::shared_ptr<Session> create(const nlohmann::json& body);
  std::shared_ptr<Session> get(const std::string& id);
  void remove(const std::string& id);
  std::size_t size();
  void expire_idle();

 private:
  std::string new_id();

  std::size_t capacity_;
  std::chrono::seconds idle_timeout_;
  Clock clock_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

// Registers the REST and event-stream routes under /api/v1 (and /api).
void install_routes(httplib::Server& server, SessionManager& sessions);

// Blocking; returns when the server stops.
void serve(const std::string& host, int port, SessionManager& sessions);

}  // namespace pansim
