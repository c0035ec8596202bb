#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pansim {

using PersonId = std::int32_t;
using LocationId = std::int32_t;

inline constexpr LocationId kNoLocation = -1;

/// Raised for invalid configuration input (bad counts, unknown names, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class LocationKind : std::uint8_t {
  home,
  grocery,
  office,
  school,
  hospital,
  retail,
  hair_salon,
  cemetery,
};
inline constexpr int kLocationKindCount = 8;

std::string_view to_string(LocationKind kind);
LocationKind location_kind_from_string(std::string_view name);

// At homes the residents take the worker role and guests the visitor role.
// Hospital patients mix with staff through the visitor components of the
// contact-rate triple.
enum class Role : std::uint8_t { worker, visitor, patient };

enum class RiskClass : std::uint8_t { normal, high };

enum class AgeCategory : std::uint8_t { minor, working_adult, retiree };

enum class TestStatus : std::uint8_t { untested, negative, positive };

/// Hourly pairwise contact probabilities: worker-worker, worker-visitor,
/// visitor-visitor.
struct ContactRates {
  double worker_worker = 0.0;
  double worker_visitor = 0.0;
  double visitor_visitor = 0.0;

  bool any_positive() const {
    return worker_worker > 0.0 || worker_visitor > 0.0 || visitor_visitor > 0.0;
  }
  bool operator==(const ContactRates&) const = default;
};

/// Per-person floors on sampled degree, one per contact-rate component.
struct MinContacts {
  int worker_worker = 0;
  int worker_visitor = 0;
  int visitor_visitor = 0;
  bool operator==(const MinContacts&) const = default;
};

/// Simulated time. Day 0 is a Monday; weekdays 5 and 6 are the weekend.
struct Calendar {
  int day = 0;
  int hour = 0;

  int weekday() const { return day % 7; }
  bool is_weekend() const { return weekday() >= 5; }

  void advance_hour() {
    if (++hour == 24) {
      hour = 0;
      ++day;
    }
  }
  bool operator==(const Calendar&) const = default;
};

/// Set of location kinds, e.g. the kinds closed by a regulation.
class KindSet {
 public:
  constexpr KindSet() = default;
  constexpr KindSet(std::initializer_list<LocationKind> kinds) {
    for (auto k : kinds) insert(k);
  }
  constexpr void insert(LocationKind k) { bits_ |= bit(k); }
  constexpr bool contains(LocationKind k) const { return (bits_ & bit(k)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  // True when every kind in this set is also in `other`.
  constexpr bool subset_of(KindSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr std::uint16_t bits() const { return bits_; }
  bool operator==(const KindSet&) const = default;

 private:
  static constexpr std::uint16_t bit(LocationKind k) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(k));
  }
  std::uint16_t bits_ = 0;
};

}  // namespace pansim
