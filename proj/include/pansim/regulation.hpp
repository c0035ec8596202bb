#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pansim/types.hpp"

namespace pansim {

/// Maximum recommended gathering size per risk class; nullopt = no limit.
struct GatheringLimit {
  std::optional<int> normal;
  std::optional<int> high;

  std::optional<int> for_risk(RiskClass r) const { return r == RiskClass::high ? high : normal; }
  bool operator==(const GatheringLimit&) const = default;
};

/// One government stage.
struct Regulation {
  int stage = 0;
  double social_distancing = 0.0;  // beta in [0, 1]
  bool stay_home_if_sick = false;
  bool practice_good_hygiene = false;
  bool wear_facial_coverings = false;
  GatheringLimit gathering_limit;
  KindSet locked_kinds;

  // Rules that persons may ignore on a failed compliance draw.
  bool has_advisory() const {
    return stay_home_if_sick || practice_good_hygiene || wear_facial_coverings ||
           gathering_limit.normal.has_value() || gathering_limit.high.has_value();
  }
  bool operator==(const Regulation&) const = default;
};

enum class StageTableKind { five_stage, swedish, italian };

StageTableKind stage_table_kind_from_string(std::string_view name);
std::string_view to_string(StageTableKind kind);

/// Ordered stage definitions, index == stage.
std::vector<Regulation> stage_table(StageTableKind kind);
std::vector<Regulation> stage_table(std::string_view name);

}  // namespace pansim
