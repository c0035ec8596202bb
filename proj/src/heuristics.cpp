#include "pansim/heuristics.hpp"

#include <algorithm>
#include <cctype>

namespace pansim {

int S040Policy::stage_at(int days) const {
  if (days < hold_) return 4;
  if (step_days_ <= 0) return 0;
  const int step = (days - hold_) / step_days_;
  return std::max(0, 3 - step);
}

int S040Policy::decide(const PolicyObservation& obs) {
  if (trigger_day_ < 0) {
    if (obs.perceived.infected < threshold_) return 0;
    trigger_day_ = obs.day;
  }
  return stage_at(obs.day - trigger_day_);
}

int ItalianPolicy::decide(const PolicyObservation& obs) {
  const int infected = std::max(1, obs.perceived.infected);
  if (base_ < 0) {
    base_ = infected;
    stage_ = 1;
  }
  while (stage_ < obs.max_stage &&
         static_cast<long long>(infected) >= static_cast<long long>(base_) << stage_)
    ++stage_;
  return stage_;
}

namespace {
std::string normalize(std::string_view name) {
  std::string s;
  for (char c : name)
    if (c != '-' && c != '_') s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace

std::unique_ptr<StagePolicy> make_heuristic_policy(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "s040") return std::make_unique<S040Policy>(0, "S0-4-0");
  if (n == "s040fi") return std::make_unique<S040Policy>(5, "S0-4-0-FI");
  if (n == "s040gi") return std::make_unique<S040Policy>(10, "S0-4-0-GI");
  if (n == "swe") return std::make_unique<SwedishPolicy>();
  if (n == "ita") return std::make_unique<ItalianPolicy>();
  std::string digits;
  if (n.rfind("constant", 0) == 0) digits = n.substr(8);
  else if (n.size() == 2 && n[0] == 's') digits = n.substr(1);
  if (digits.size() == 1 && std::isdigit(static_cast<unsigned char>(digits[0])))
    return std::make_unique<ConstantPolicy>(digits[0] - '0');
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::vector<std::string> benchmark_policy_names() {
  return {"S0-4-0", "S0-4-0-FI", "S0-4-0-GI", "SWE", "ITA"};
}

}  // namespace pansim
