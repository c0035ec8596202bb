#include "pansim/disease.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pansim {

std::string_view to_string(Compartment c) {
  switch (c) {
    case Compartment::susceptible: return "S";
    case Compartment::exposed: return "E";
    case Compartment::presymptomatic: return "preY";
    case Compartment::preasymptomatic: return "preA";
    case Compartment::symptomatic: return "Y";
    case Compartment::asymptomatic: return "A";
    case Compartment::hospitalized: return "H";
    case Compartment::needs_hospital: return "N";
    case Compartment::recovered: return "R";
    case Compartment::dead: return "D";
  }
  return "?";
}

bool is_legal_transition(Compartment from, Compartment to) {
  using C = Compartment;
  if (from == to) return true;
  switch (from) {
    case C::susceptible: return to == C::exposed;
    case C::exposed: return to == C::presymptomatic || to == C::preasymptomatic;
    case C::presymptomatic: return to == C::symptomatic;
    case C::preasymptomatic: return to == C::asymptomatic;
    case C::symptomatic:
      return to == C::recovered || to == C::hospitalized || to == C::needs_hospital;
    case C::asymptomatic: return to == C::recovered;
    case C::hospitalized: return to == C::recovered || to == C::dead;
    case C::needs_hospital:
      return to == C::hospitalized || to == C::recovered || to == C::dead;
    case C::recovered:
    case C::dead: return false;
  }
  return false;
}

int age_group(int age) {
  if (age < 5) return 0;
  if (age < 18) return 1;
  if (age < 50) return 2;
  if (age < 65) return 3;
  return 4;
}

double SeirParams::hospitalization_probability(int group, RiskClass risk) const {
  const AgeVector& yhr = risk == RiskClass::high ? yhr_high_risk_pct : yhr_low_risk_pct;
  return yhr[group] / 100.0;
}

double SeirParams::hospital_fatality_probability(int group) const { return hfr_pct[group] / 100.0; }

double SeirParams::pi(int group, RiskClass risk) const {
  double gamma_y = 1.0 / symptomatic_recovery_days.mean();
  double eta = symptom_to_hospital_rate;
  double yhr = hospitalization_probability(group, risk);
  return gamma_y * yhr / (eta + (gamma_y - eta) * yhr);
}

double SeirParams::nu(int group) const {
  double gamma_h = 1.0 / hospital_recovery_days.mean();
  double mu = 1.0 / hospital_death_days.mean();
  double hfr = hospital_fatality_probability(group);
  return gamma_h * hfr / (mu + (gamma_h - mu) * hfr);
}

namespace {

void require(bool ok, const char* field) {
  if (!ok) throw ConfigError(std::string("seir: invalid value for ") + field);
}

bool unit(double p) { return p >= 0.0 && p <= 1.0; }

bool positive_triangle(const Triangular& t) { return t.ordered() && t.min > 0.0; }

double daily_exit_probability(double rate) { return 1.0 - std::exp(-rate); }

}  // namespace

void SeirParams::validate() const {
  require(positive_triangle(latent_days), "latent_days");
  require(unit(symptomatic_fraction), "symptomatic_fraction");
  require(presymptomatic_days > 0.0, "presymptomatic_days");
  require(preasymptomatic_days > 0.0, "preasymptomatic_days");
  require(positive_triangle(symptomatic_recovery_days), "symptomatic_recovery_days");
  require(positive_triangle(asymptomatic_recovery_days), "asymptomatic_recovery_days");
  require(positive_triangle(hospital_recovery_days), "hospital_recovery_days");
  require(positive_triangle(hospital_death_days), "hospital_death_days");
  require(needs_hospital_recovery_rate >= 0.0, "needs_hospital_recovery_rate");
  require(symptom_to_hospital_rate >= 0.0, "symptom_to_hospital_rate");
  require(unserved_death_rate >= 0.0, "unserved_death_rate");
  for (int g = 0; g < kAgeGroupCount; ++g) {
    require(unit(yhr_low_risk_pct[g] / 100.0), "yhr_low_risk_pct");
    require(unit(yhr_high_risk_pct[g] / 100.0), "yhr_high_risk_pct");
    require(unit(yhr_overall_pct[g] / 100.0), "yhr_overall_pct");
    require(unit(hfr_pct[g] / 100.0), "hfr_pct");
    require(unit(unserved_death_prob[g]), "unserved_death_prob");
  }
}

std::optional<LocationId> HospitalBeds::admit() {
  for (auto& w : wards_) {
    if (w.occupied < w.capacity) {
      ++w.occupied;
      return w.hospital;
    }
  }
  return std::nullopt;
}

bool HospitalBeds::has_free_bed() const {
  return std::any_of(wards_.begin(), wards_.end(),
                     [](const Ward& w) { return w.occupied < w.capacity; });
}

void HospitalBeds::discharge(LocationId hospital) {
  for (auto& w : wards_) {
    if (w.hospital == hospital) {
      if (w.occupied == 0) throw ContractViolation("discharge from an empty ward");
      --w.occupied;
      return;
    }
  }
  throw ContractViolation("discharge from an unknown hospital");
}

int HospitalBeds::capacity() const {
  int total = 0;
  for (const auto& w : wards_) total += w.capacity;
  return total;
}

int HospitalBeds::occupied() const {
  int total = 0;
  for (const auto& w : wards_) total += w.occupied;
  return total;
}

namespace {

int sample_days(const Triangular& t, SeededRng& rng) {
  return std::max(1, rng.stochastic_round(rng.triangular(t.min, t.mode, t.max)));
}

int sample_days(double mean_days, SeededRng& rng) {
  return std::max(1, rng.stochastic_round(mean_days));
}

}  // namespace

DiseaseState enter_compartment(Compartment c, const PatientTraits& traits,
                               const SeirParams& params, SeededRng& rng) {
  using C = Compartment;
  DiseaseState s;
  s.compartment = c;
  switch (c) {
    case C::exposed:
      s.duration_days = sample_days(params.latent_days, rng);
      s.committed_next =
          rng.bernoulli(params.symptomatic_fraction) ? C::presymptomatic : C::preasymptomatic;
      break;
    case C::presymptomatic:
      s.duration_days = sample_days(params.presymptomatic_days, rng);
      s.committed_next = C::symptomatic;
      break;
    case C::preasymptomatic:
      s.duration_days = sample_days(params.preasymptomatic_days, rng);
      s.committed_next = C::asymptomatic;
      break;
    case C::symptomatic:
      if (rng.bernoulli(params.hospitalization_probability(traits.age_group, traits.risk))) {
        s.committed_next = C::hospitalized;
      } else {
        s.duration_days = sample_days(params.symptomatic_recovery_days, rng);
        s.committed_next = C::recovered;
      }
      break;
    case C::asymptomatic:
      s.duration_days = sample_days(params.asymptomatic_recovery_days, rng);
      s.committed_next = C::recovered;
      break;
    case C::hospitalized:
      if (rng.bernoulli(params.hospital_fatality_probability(traits.age_group))) {
        s.duration_days = sample_days(params.hospital_death_days, rng);
        s.committed_next = C::dead;
      } else {
        s.duration_days = sample_days(params.hospital_recovery_days, rng);
        s.committed_next = C::recovered;
      }
      break;
    case C::needs_hospital:
      s.committed_next =
          rng.bernoulli(params.unserved_death_prob[traits.age_group]) ? C::dead : C::recovered;
      break;
    case C::susceptible:
    case C::recovered:
    case C::dead:
      break;
  }
  return s;
}

Progression seir_daily_update(DiseaseState& state, LocationId& hospital,
                              const PatientTraits& traits, const SeirParams& params,
                              HospitalBeds& beds, SeededRng& rng) {
  using C = Compartment;
  const C from = state.compartment;
  if (from == C::susceptible || from == C::recovered || from == C::dead) return {from, from};

  ++state.days_in_compartment;
  auto move_to = [&](C next) { state = enter_compartment(next, traits, params, rng); };

  switch (from) {
    case C::symptomatic:
      if (state.committed_next == C::hospitalized) {
        if (rng.bernoulli(daily_exit_probability(params.symptom_to_hospital_rate))) {
          if (auto ward = beds.admit()) {
            hospital = *ward;
            move_to(C::hospitalized);
          } else {
            move_to(C::needs_hospital);
          }
        }
      } else if (state.days_in_compartment >= state.duration_days) {
        move_to(C::recovered);
      }
      break;
    case C::needs_hospital: {
      if (auto ward = beds.admit()) {
        hospital = *ward;
        move_to(C::hospitalized);
        break;
      }
      double rate = state.committed_next == C::dead ? params.unserved_death_rate
                                                    : params.needs_hospital_recovery_rate;
      if (rng.bernoulli(daily_exit_probability(rate))) move_to(*state.committed_next);
      break;
    }
    case C::hospitalized:
      if (state.days_in_compartment >= state.duration_days) {
        beds.discharge(hospital);
        hospital = kNoLocation;
        move_to(*state.committed_next);
      }
      break;
    default:
      if (state.days_in_compartment >= state.duration_days) move_to(*state.committed_next);
      break;
  }
  return {from, state.compartment};
}

double draw_spread_rate(double mean, double sd, SeededRng& rng) {
  if (sd <= 0.0) return std::clamp(mean, 0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    double x = rng.normal(mean, sd);
    if (x >= 0.0 && x <= 1.0) return x;
  }
  return std::clamp(mean, 0.0, 1.0);
}

double hourly_survival(std::span<const InfectiousContact> contacts) {
  double survival = 1.0;
  for (const auto& c : contacts) survival *= 1.0 - c.spread_rate * c.multiplier;
  return survival;
}

double hourly_survival(Compartment person, std::span<const InfectiousContact> contacts) {
  if (person != Compartment::susceptible)
    throw ContractViolation("hourly_survival: person is not susceptible");
  return hourly_survival(contacts);
}

double daily_infection_probability(std::span<const double> hourly_survivals) {
  double survival = 1.0;
  for (double s : hourly_survivals) survival *= s;
  return 1.0 - survival;
}

namespace {

// Walks the upper triangle of an n x n pair matrix, visiting each pair with
// probability p via geometric skips.
template <typename Emit>
void sample_triangle(int n, double p, SeededRng& rng, Emit&& emit) {
  if (n < 2 || p <= 0.0) return;
  std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (p >= 1.0) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) emit(i, j);
    return;
  }
  std::uint64_t consumed = 0;  // pairs passed so far
  int i = 0;
  std::uint64_t j = 1;
  std::uint64_t skip = rng.geometric(p);
  for (;;) {
    if (skip >= total - consumed) return;
    consumed += skip + 1;
    j += skip;
    while (j >= static_cast<std::uint64_t>(n)) {
      ++i;
      j = j - n + i + 1;
    }
    emit(i, static_cast<int>(j));
    ++j;
    if (j >= static_cast<std::uint64_t>(n)) {
      ++i;
      j = i + 1;
    }
    skip = rng.geometric(p);
  }
}

template <typename Emit>
void sample_grid(int rows, int cols, double p, SeededRng& rng, Emit&& emit) {
  if (rows == 0 || cols == 0 || p <= 0.0) return;
  std::uint64_t total = static_cast<std::uint64_t>(rows) * cols;
  if (p >= 1.0) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) emit(i, j);
    return;
  }
  std::uint64_t k = rng.geometric(p);
  while (k < total) {
    emit(static_cast<int>(k / cols), static_cast<int>(k % cols));
    std::uint64_t skip = rng.geometric(p);
    if (skip >= total - k) return;
    k += skip + 1;
  }
}

Contact make_contact(PersonId x, PersonId y) { return x < y ? Contact{x, y} : Contact{y, x}; }

// Tops up the degree of each deficient member of `group` with uniformly drawn
// partners from `pool`. `same_group` means partners come from the same list
// (so self-pairs are excluded and both endpoints gain degree).
void apply_floor(std::span<const PersonId> group, std::span<const PersonId> pool,
                 std::vector<int>& degree, std::vector<int>* pool_degree, int floor,
                 bool same_group, std::span<const Contact> block, std::size_t block_begin,
                 SeededRng& rng, std::vector<Contact>& out, ContactScratch& scratch) {
  if (floor <= 0 || group.empty() || pool.empty()) return;
  auto& deficient = scratch.deficient;
  deficient.clear();
  for (std::size_t i = 0; i < group.size(); ++i)
    if (degree[i] < floor) deficient.push_back(static_cast<int>(i));
  if (deficient.empty()) return;

  // Local index lookup: global id -> position in group / pool. Groups are
  // small per location-hour, so a linear map over the block is enough.
  auto& slot = scratch.slot;
  slot.assign(group.size(), -1);
  for (std::size_t d = 0; d < deficient.size(); ++d) slot[deficient[d]] = static_cast<int>(d);
  if (scratch.partners.size() < deficient.size()) scratch.partners.resize(deficient.size());
  for (std::size_t d = 0; d < deficient.size(); ++d) scratch.partners[d].clear();

  auto index_in = [](std::span<const PersonId> list, PersonId id) -> int {
    // Lists are sorted by id (built in person order).
    auto it = std::lower_bound(list.begin(), list.end(), id);
    if (it != list.end() && *it == id) return static_cast<int>(it - list.begin());
    return -1;
  };

  // Existing partners of deficient members within this block.
  for (std::size_t e = block_begin; e < block.size(); ++e) {
    const Contact& c = block[e];
    for (int side = 0; side < 2; ++side) {
      PersonId self = side == 0 ? c.a : c.b;
      PersonId other = side == 0 ? c.b : c.a;
      int gi = index_in(group, self);
      if (gi < 0 || slot[gi] < 0) continue;
      int pi = index_in(pool, other);
      if (pi < 0) continue;
      scratch.partners[slot[gi]].push_back(pi);
    }
  }

  const int pool_size = static_cast<int>(pool.size());
  for (int gi : deficient) {
    auto& mine = scratch.partners[slot[gi]];
    int self_in_pool = same_group ? gi : -1;
    while (degree[gi] < floor) {
      int available = pool_size - static_cast<int>(mine.size()) - (same_group ? 1 : 0);
      if (available <= 0) break;
      int pick = -1;
      if (available <= floor - degree[gi]) {
        // Take the first available candidate deterministically.
        for (int k = 0; k < pool_size; ++k) {
          if (k == self_in_pool) continue;
          if (std::find(mine.begin(), mine.end(), k) != mine.end()) continue;
          pick = k;
          break;
        }
      } else {
        for (;;) {
          int k = static_cast<int>(rng.below(pool_size));
          if (k == self_in_pool) continue;
          if (std::find(mine.begin(), mine.end(), k) != mine.end()) continue;
          pick = k;
          break;
        }
      }
      mine.push_back(pick);
      ++degree[gi];
      out.push_back(make_contact(group[gi], pool[pick]));
      if (same_group) {
        ++degree[pick];
        if (slot[pick] >= 0) scratch.partners[slot[pick]].push_back(gi);
      } else if (pool_degree != nullptr) {
        ++(*pool_degree)[pick];
      }
    }
  }
}

}  // namespace

void sample_contacts(std::span<const PersonId> workers, std::span<const PersonId> visitors,
                     const ContactRates& rates, const MinContacts& floors, SeededRng& rng,
                     std::vector<Contact>& out, ContactScratch& scratch) {
  const int nw = static_cast<int>(workers.size());
  const int nv = static_cast<int>(visitors.size());
  if (nw + nv < 2) return;
  const bool use_floors = rates.any_positive();

  auto& ww = scratch.ww_degree;
  auto& wv = scratch.wv_degree;
  auto& vv = scratch.vv_degree;
  ww.assign(nw, 0);
  wv.assign(nv, 0);
  vv.assign(nv, 0);

  std::size_t ww_begin = out.size();
  sample_triangle(nw, rates.worker_worker, rng, [&](int i, int j) {
    out.push_back(make_contact(workers[i], workers[j]));
    ++ww[i];
    ++ww[j];
  });
  if (use_floors)
    apply_floor(workers, workers, ww, nullptr, floors.worker_worker, true, out, ww_begin, rng,
                out, scratch);

  std::size_t wv_begin = out.size();
  sample_grid(nw, nv, rates.worker_visitor, rng, [&](int i, int j) {
    out.push_back(make_contact(workers[i], visitors[j]));
    ++wv[j];
  });
  if (use_floors)
    apply_floor(visitors, workers, wv, nullptr, floors.worker_visitor, false, out, wv_begin, rng,
                out, scratch);

  std::size_t vv_begin = out.size();
  sample_triangle(nv, rates.visitor_visitor, rng, [&](int i, int j) {
    out.push_back(make_contact(visitors[i], visitors[j]));
    ++vv[i];
    ++vv[j];
  });
  if (use_floors)
    apply_floor(visitors, visitors, vv, nullptr, floors.visitor_visitor, true, out, vv_begin, rng,
                out, scratch);
}

ContactSet sample_contacts(LocationId location, int hour, std::span<const PersonId> workers,
                           std::span<const PersonId> visitors, const ContactRates& rates,
                           const MinContacts& floors, SeededRng& rng) {
  ContactSet set;
  set.location = location;
  set.hour = hour;
  ContactScratch scratch;
  sample_contacts(workers, visitors, rates, floors, rng, set.pairs, scratch);
  return set;
}

void ExposureLedger::reset(std::size_t population) {
  hour_survival_.assign(population, 1.0);
  day_survival_.assign(population, 1.0);
  touched_.clear();
}

void ExposureLedger::add_contact(const Contact& c, std::span<const double> transmit,
                                 std::span<const std::uint8_t> susceptible) {
  if (transmit[c.a] > 0.0 && susceptible[c.b]) {
    if (hour_survival_[c.b] == 1.0) touched_.push_back(c.b);
    hour_survival_[c.b] *= 1.0 - transmit[c.a];
  }
  if (transmit[c.b] > 0.0 && susceptible[c.a]) {
    if (hour_survival_[c.a] == 1.0) touched_.push_back(c.a);
    hour_survival_[c.a] *= 1.0 - transmit[c.b];
  }
}

void ExposureLedger::end_hour() {
  for (PersonId p : touched_) {
    day_survival_[p] *= hour_survival_[p];
    hour_survival_[p] = 1.0;
  }
  touched_.clear();
}

}  // namespace pansim
