#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pansim/engine.hpp"

namespace pansim {

/// Holds one stage forever.
class ConstantPolicy : public StagePolicy {
 public:
  explicit ConstantPolicy(int stage, StageTableKind table = StageTableKind::five_stage)
      : stage_(stage), table_(table) {}
  std::string name() const override { return "constant-" + std::to_string(stage_); }
  int decide(const PolicyObservation&) override { return stage_; }
  StageTableKind stage_table() const override { return table_; }

 private:
  int stage_;
  StageTableKind table_;
};

/// Stage 4 for `hold_days` once perceived infections reach `threshold`, then
/// a descent through stages 3, 2, 1 with `step_days` each (0 = straight to 0).
class S040Policy : public StagePolicy {
 public:
  S040Policy(int step_days, std::string name, int threshold = 10, int hold_days = 30)
      : step_days_(step_days), name_(std::move(name)), threshold_(threshold), hold_(hold_days) {}
  std::string name() const override { return name_; }
  void reset() override { trigger_day_ = -1; }
  int decide(const PolicyObservation& obs) override;

  // Stage `days_since_trigger` days after the trigger.
  int stage_at(int days_since_trigger) const;

 private:
  int step_days_;
  std::string name_;
  int threshold_;
  int hold_;
  int trigger_day_ = -1;
};

/// Swedish table: stage 1 from the first consultation onwards.
class SwedishPolicy : public StagePolicy {
 public:
  std::string name() const override { return "SWE"; }
  int decide(const PolicyObservation&) override { return 1; }
  StageTableKind stage_table() const override { return StageTableKind::swedish; }
};

/// Italian table: stage 1 when first consulted, one stage higher each time
/// perceived infections double relative to the trigger level.
class ItalianPolicy : public StagePolicy {
 public:
  std::string name() const override { return "ITA"; }
  void reset() override { base_ = -1; stage_ = 0; }
  int decide(const PolicyObservation& obs) override;
  StageTableKind stage_table() const override { return StageTableKind::italian; }

 private:
  int base_ = -1;
  int stage_ = 0;
};

/// Known names: S0-4-0, S0-4-0-FI, S0-4-0-GI, SWE, ITA, constant-<k> (also
/// the short forms s040, s040fi, s040gi, s<k>).
std::unique_ptr<StagePolicy> make_heuristic_policy(std::string_view name);
std::vector<std::string> benchmark_policy_names();

}  // namespace pansim
