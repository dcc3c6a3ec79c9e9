#include "gridflex/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>

#include <fmt/format.h>

#include "gridflex/error.hpp"

namespace gridflex {
namespace {

// Relocated charging keeps this much headroom below C_max so that summation
// order differences between the forecast and the metered load can never tip
// a relocated minute over the limit.
constexpr double kCapacityMarginKw = 1e-6;
constexpr double kEnergyEpsilon = 1e-9;

template <class LoadFn>
std::vector<OverloadPeriod> scan_overloads(TimePoint start, std::size_t n,
                                           double c_max, LoadFn load) {
  std::vector<OverloadPeriod> periods;
  std::size_t i = 0;
  while (i < n) {
    if (!(load(i) > c_max)) {
      ++i;
      continue;
    }
    OverloadPeriod period;
    period.start = start + minutes{static_cast<long>(i)};
    while (i < n && load(i) > c_max) {
      const double l = load(i);
      period.peak_kw = std::max(period.peak_kw, l);
      period.excess_kwh += (l - c_max) / 60.0;
      ++i;
    }
    period.end = start + minutes{static_cast<long>(i)};
    periods.push_back(period);
  }
  return periods;
}

std::vector<OverloadPeriod> book_overloads(const LoadBook& book, TimePoint from,
                                           TimePoint to, double c_max) {
  if (to <= from) return {};
  const auto n = static_cast<std::size_t>((to - from).count());
  return scan_overloads(from, n, c_max, [&](std::size_t i) {
    return book.load_at(from + minutes{static_cast<long>(i)});
  });
}

std::size_t minute_index(const ChargingSchedule& s, TimePoint t) {
  return static_cast<std::size_t>((t - s.start()).count());
}

// Applies schedule edits to one offer and mirrors them into the book, with an
// undo log so a failed relocation attempt can be rolled back exactly.
class ScheduleEditor {
 public:
  ScheduleEditor(FlexOffer& offer, LoadBook& book)
      : offer_(offer), book_(book) {}

  void set(TimePoint t, double power) {
    auto& slot = offer_.schedule[minute_index(offer_.schedule, t)];
    undo_.push_back({t, slot});
    book_.add_power(t, power - slot);
    slot = power;
  }

  void rollback() {
    for (auto it = undo_.rbegin(); it != undo_.rend(); ++it) {
      auto& slot = offer_.schedule[minute_index(offer_.schedule, it->t)];
      book_.add_power(it->t, it->old_power - slot);
      slot = it->old_power;
    }
    undo_.clear();
  }

 private:
  struct Entry {
    TimePoint t;
    double old_power;
  };
  FlexOffer& offer_;
  LoadBook& book_;
  std::vector<Entry> undo_;
};

class Relocation {
 public:
  Relocation(FlexOffer& offer, LoadBook& book, double c_max,
             const PriceLookup& prices, TimePoint now)
      : offer_(offer),
        book_(book),
        editor_(offer, book),
        c_max_(c_max),
        prices_(prices),
        earliest_(std::max(now, offer.plug_in)) {}

  // Zeroes the EV inside `period` and tries to place the removed energy.
  // Returns the energy that could not be placed.
  double run(const OverloadPeriod& period) {
    const TimePoint from = std::max(period.start, earliest_);
    const TimePoint to = std::min(period.end, offer_.departure);
    std::map<TimePoint, double> removed_by_hour;
    for (TimePoint t = from; t < to; t += minutes{1}) {
      const double p = offer_.schedule.power_at(t);
      if (p <= 0.0) continue;
      removed_by_hour[floor_hour(t)] += p / 60.0;
      removed_kwh_ += p / 60.0;
      editor_.set(t, 0.0);
    }

    double leftover = 0.0;
    for (const auto& [hour, energy] : removed_by_hour) {
      leftover += place_in_same_hour(hour, energy);
    }
    if (leftover > kEnergyEpsilon) leftover = place_in_cheapest_hours(leftover);
    return leftover > kEnergyEpsilon ? leftover : 0.0;
  }

  double removed_kwh() const { return removed_kwh_; }
  void rollback() { editor_.rollback(); }

 private:
  bool free(TimePoint t) const {
    return t >= earliest_ && t < offer_.departure &&
           offer_.schedule.power_at(t) == 0.0 &&
           book_.load_at(t) + offer_.max_power_kw <= c_max_ - kCapacityMarginKw;
  }

  double place(TimePoint t, double remaining) {
    const double power = std::min(offer_.max_power_kw, remaining * 60.0);
    editor_.set(t, power);
    remaining -= power / 60.0;
    return remaining < 1e-12 ? 0.0 : remaining;
  }

  // Backward search from the end of the hour; one contiguous block when it
  // fits, otherwise whatever free minutes remain, latest first.
  double place_in_same_hour(TimePoint hour, double energy) {
    const TimePoint lo = std::max(hour, earliest_);
    const TimePoint hi = std::min(hour + hours{1}, offer_.departure);
    if (hi <= lo) return energy;
    const double per_minute = offer_.max_power_kw / 60.0;
    const auto needed =
        static_cast<long>(std::ceil(energy / per_minute - kEnergyEpsilon));

    long run = 0;
    for (TimePoint t = hi - minutes{1}; t >= lo; t -= minutes{1}) {
      run = free(t) ? run + 1 : 0;
      if (run == needed) {
        double remaining = energy;
        for (TimePoint m = t; m < t + minutes{needed} && remaining > 0.0;
             m += minutes{1}) {
          remaining = place(m, remaining);
        }
        return remaining;
      }
    }
    return fill_backward(lo, hi, energy);
  }

  double fill_backward(TimePoint lo, TimePoint hi, double remaining) {
    for (TimePoint t = hi - minutes{1}; t >= lo && remaining > 0.0;
         t -= minutes{1}) {
      if (free(t)) remaining = place(t, remaining);
    }
    return remaining;
  }

  double place_in_cheapest_hours(double remaining) {
    struct Hour {
      TimePoint start;
      double price;
    };
    std::vector<Hour> hours_left;
    for (TimePoint h = floor_hour(earliest_); h < offer_.departure;
         h += hours{1}) {
      hours_left.push_back({h, prices_(std::max(h, earliest_))});
    }
    std::stable_sort(
        hours_left.begin(), hours_left.end(),
        [](const Hour& a, const Hour& b) { return a.price < b.price; });
    for (const auto& h : hours_left) {
      if (remaining <= 0.0) break;
      const TimePoint lo = std::max(h.start, earliest_);
      const TimePoint hi = std::min(h.start + hours{1}, offer_.departure);
      remaining = fill_backward(lo, hi, remaining);
    }
    return remaining;
  }

  FlexOffer& offer_;
  LoadBook& book_;
  ScheduleEditor editor_;
  double c_max_;
  const PriceLookup& prices_;
  TimePoint earliest_;
  double removed_kwh_ = 0.0;
};

// Last resort before keeping EVs off: an exhaustive search that re-plans
// every active EV at once on 15-minute chunks. Only small portfolios are
// searched and the node budget keeps the cost bounded.
constexpr std::size_t kRepackMaxEvs = 6;
constexpr long kRepackNodeBudget = 200000;
constexpr long kChunkMinutes = 15;

class Repack {
 public:
  Repack(std::vector<FlexOffer>& portfolio, LoadBook& book, double c_max,
         TimePoint now)
      : portfolio_(portfolio), book_(book), c_max_(c_max), now_(now) {}

  // Returns the ids whose schedules changed, or nothing if no full-energy
  // plan was found within budget.
  std::optional<std::vector<int>> run() {
    for (std::size_t i = 0; i < portfolio_.size(); ++i) {
      if (portfolio_[i].departure > now_) evs_.push_back(make_ev(i));
    }
    if (evs_.empty() || evs_.size() > kRepackMaxEvs) return std::nullopt;
    build_chunks();
    std::vector<double> remaining;
    for (const auto& ev : evs_) remaining.push_back(ev.remaining);
    choice_.assign(chunks_.size(), 0);
    if (!search(0, remaining)) return std::nullopt;
    return apply();
  }

 private:
  struct Ev {
    std::size_t index;
    TimePoint from;
    TimePoint to;
    double power;
    double remaining;
  };
  struct Chunk {
    TimePoint start;
    TimePoint end;
    double room;
  };

  Ev make_ev(std::size_t i) const {
    const auto& o = portfolio_[i];
    const double delivered = o.schedule.energy_between(o.plug_in, now_);
    return {i, std::max(now_, o.plug_in), o.departure, o.max_power_kw,
            std::max(0.0, o.required_energy_kwh - delivered)};
  }

  double fixed_load(TimePoint t) const {
    double load = book_.load_at(t);
    for (const auto& ev : evs_) load -= portfolio_[ev.index].schedule.power_at(t);
    return load;
  }

  void build_chunks() {
    std::set<TimePoint> cuts;
    TimePoint end = now_;
    for (const auto& ev : evs_) {
      cuts.insert(ev.from);
      cuts.insert(ev.to);
      end = std::max(end, ev.to);
    }
    const auto grid = [](TimePoint t) {
      const long m = t.time_since_epoch().count();
      return TimePoint{minutes{m - ((m % kChunkMinutes) + kChunkMinutes) % kChunkMinutes}};
    };
    for (TimePoint t = grid(now_) + minutes{kChunkMinutes}; t < end;
         t += minutes{kChunkMinutes}) {
      cuts.insert(t);
    }
    cuts.insert(now_);
    TimePoint prev = now_;
    for (const TimePoint cut : cuts) {
      if (cut <= prev) continue;
      if (cut > end) break;
      double base = 0.0;
      for (TimePoint t = prev; t < cut; t += minutes{1}) base = std::max(base, fixed_load(t));
      chunks_.push_back({prev, cut, c_max_ - kCapacityMarginKw - base});
      prev = cut;
    }
  }

  std::string key(std::size_t chunk, const std::vector<double>& remaining) const {
    std::string k = std::to_string(chunk);
    for (const double r : remaining) k += ',' + std::to_string(std::llround(r * 1e6));
    return k;
  }

  bool search(std::size_t chunk, std::vector<double>& remaining) {
    if (++nodes_ > kRepackNodeBudget) return false;
    bool done = true;
    for (std::size_t i = 0; i < evs_.size(); ++i) {
      if (remaining[i] <= kEnergyEpsilon) continue;
      done = false;
      const TimePoint from =
          chunk < chunks_.size() ? std::max(chunks_[chunk].start, evs_[i].from) : evs_[i].to;
      const double reachable =
          evs_[i].power * static_cast<double>(std::max<long>(0, (evs_[i].to - from).count())) / 60.0;
      if (reachable < remaining[i] - kEnergyEpsilon) return false;
    }
    if (done) return true;
    if (chunk >= chunks_.size()) return false;
    const auto k = key(chunk, remaining);
    if (failed_.contains(k)) return false;

    const Chunk& c = chunks_[chunk];
    const double hours_in_chunk = static_cast<double>((c.end - c.start).count()) / 60.0;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < evs_.size(); ++i) {
      if (remaining[i] > kEnergyEpsilon && evs_[i].from <= c.start && c.end <= evs_[i].to) {
        active.push_back(i);
      }
    }
    const std::size_t subsets = std::size_t{1} << active.size();
    for (std::size_t mask = subsets; mask-- > 0;) {
      double power = 0.0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (mask & (std::size_t{1} << j)) power += evs_[active[j]].power;
      }
      if (power > c.room) continue;
      std::vector<double> next = remaining;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (mask & (std::size_t{1} << j)) {
          const std::size_t i = active[j];
          next[i] = std::max(0.0, next[i] - evs_[i].power * hours_in_chunk);
        }
      }
      choice_[chunk] = 0;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (mask & (std::size_t{1} << j)) choice_[chunk] |= std::uint32_t{1} << active[j];
      }
      if (search(chunk + 1, next)) return true;
    }
    choice_[chunk] = 0;
    failed_.insert(k);
    return false;
  }

  std::vector<int> apply() {
    std::vector<int> changed;
    for (std::size_t i = 0; i < evs_.size(); ++i) {
      FlexOffer& offer = portfolio_[evs_[i].index];
      const ChargingSchedule before = offer.schedule;
      ScheduleEditor editor(offer, book_);
      for (TimePoint t = evs_[i].from; t < evs_[i].to; t += minutes{1}) {
        if (offer.schedule.power_at(t) != 0.0) editor.set(t, 0.0);
      }
      double remaining = evs_[i].remaining;
      for (std::size_t k = 0; k < chunks_.size() && remaining > kEnergyEpsilon; ++k) {
        if (!(choice_[k] & (std::uint32_t{1} << i))) continue;
        for (TimePoint t = chunks_[k].start; t < chunks_[k].end && remaining > 0.0;
             t += minutes{1}) {
          const double p = std::min(evs_[i].power, remaining * 60.0);
          editor.set(t, p);
          remaining -= p / 60.0;
          if (remaining < 1e-12) remaining = 0.0;
        }
      }
      if (!(offer.schedule == before)) changed.push_back(offer.ev_id);
    }
    return changed;
  }

  std::vector<FlexOffer>& portfolio_;
  LoadBook& book_;
  double c_max_;
  TimePoint now_;
  std::vector<Ev> evs_;
  std::vector<Chunk> chunks_;
  std::vector<std::uint32_t> choice_;
  std::unordered_set<std::string> failed_;
  long nodes_ = 0;
};

bool overloaded_within(const LoadBook& book, TimePoint from, TimePoint to,
                       double c_max) {
  for (TimePoint t = from; t < to; t += minutes{1}) {
    if (book.load_at(t) > c_max) return true;
  }
  return false;
}

bool charges_within(const FlexOffer& offer, TimePoint from, TimePoint to) {
  const TimePoint lo = std::max(from, offer.schedule.start());
  const TimePoint hi = std::min(to, offer.schedule.end());
  for (TimePoint t = lo; t < hi; t += minutes{1}) {
    if (offer.schedule.power_at(t) > 0.0) return true;
  }
  return false;
}

}  // namespace

void FlexOffer::validate() const {
  if (departure <= plug_in) {
    throw ContractError(
        fmt::format("FlexOffer for EV {}: departure not after plug-in", ev_id));
  }
  if (!(max_power_kw > 0.0) || required_energy_kwh < 0.0) {
    throw ContractError(fmt::format(
        "FlexOffer for EV {}: power must be > 0 and energy >= 0", ev_id));
  }
  if (schedule.start() != plug_in || schedule.end() != departure) {
    throw ContractError(fmt::format(
        "FlexOffer for EV {}: schedule window does not match the session",
        ev_id));
  }
  for (const double p : schedule.power_kw()) {
    if (p < 0.0 || p > max_power_kw + 1e-9) {
      throw ContractError(fmt::format(
          "FlexOffer for EV {}: schedule power {} kW outside [0, {}]", ev_id, p,
          max_power_kw));
    }
  }
}

std::vector<OverloadPeriod> detect_overloads(const LoadForecast& forecast,
                                             double c_max) {
  return scan_overloads(forecast.start, forecast.size(), c_max,
                        [&](std::size_t i) { return forecast.at(i); });
}

double laxity(const FlexOffer& offer, TimePoint now) {
  const double delivered = offer.schedule.energy_between(offer.plug_in, now);
  const double remaining =
      std::max(0.0, offer.required_energy_kwh - delivered);
  const double to_departure =
      static_cast<double>((offer.departure - now).count());
  const double charge_minutes = remaining / offer.max_power_kw * 60.0;
  return std::max(0.0, to_departure - charge_minutes);
}

CompensationRecord compensation_for(int ev_id, const ChargingSchedule& original,
                                    const ChargingSchedule& shifted,
                                    const PriceLookup& prices) {
  if (original.start() != shifted.start() || original.end() != shifted.end()) {
    throw ContractError(fmt::format(
        "compensation for EV {}: schedules cover different sessions", ev_id));
  }
  CompensationRecord record;
  record.ev_id = ev_id;
  record.session_start = original.start();
  record.original_cost_dkk = original.cost(prices);
  record.shifted_cost_dkk = shifted.cost(prices);
  record.compensation_dkk =
      std::max(0.0, record.shifted_cost_dkk - record.original_cost_dkk);
  return record;
}

// ---------------------------------------------------------------------------

std::size_t LoadBook::index(TimePoint t) const {
  if (t < origin_) {
    throw ContractError("load book queried before its origin " +
                        format_timestamp(origin_));
  }
  return static_cast<std::size_t>((t - origin_).count());
}

void LoadBook::ensure(std::size_t size) {
  if (ev_.size() < size) ev_.resize(size, 0.0);
}

void LoadBook::append_baseload(std::span<const double> hourly_kw) {
  for (const double kw : hourly_kw) {
    baseload_.insert(baseload_.end(), 60, kw);
  }
}

void LoadBook::set_baseload_minutes(std::vector<double> minute_kw) {
  baseload_ = std::move(minute_kw);
}

double LoadBook::baseload_at(TimePoint t) const {
  const auto i = index(t);
  return i < baseload_.size() ? baseload_[i] : 0.0;
}

double LoadBook::ev_at(TimePoint t) const {
  const auto i = index(t);
  return i < ev_.size() ? ev_[i] : 0.0;
}

void LoadBook::add_power(TimePoint t, double delta_kw) {
  const auto i = index(t);
  ensure(i + 1);
  ev_[i] += delta_kw;
}

void LoadBook::add_schedule(const ChargingSchedule& schedule, double sign,
                            TimePoint from) {
  const TimePoint lo = std::max(from, schedule.start());
  if (lo >= schedule.end()) return;
  const auto first = index(lo);
  ensure(index(schedule.end()));
  const auto offset = static_cast<std::size_t>((lo - schedule.start()).count());
  for (std::size_t k = offset; k < schedule.size(); ++k) {
    const double p = schedule[k];
    if (p != 0.0) ev_[first + (k - offset)] += sign * p;
  }
}

LoadForecast LoadBook::snapshot(TimePoint from, TimePoint to) const {
  LoadForecast f;
  f.start = from;
  for (TimePoint t = from; t < to; t += minutes{1}) {
    f.baseload_kw.push_back(baseload_at(t));
    f.ev_kw.push_back(ev_at(t));
  }
  return f;
}

// ---------------------------------------------------------------------------

ShiftResult shift_loads(std::vector<FlexOffer>& portfolio, LoadBook& book,
                        double c_max, const PriceLookup& prices,
                        TimePoint now) {
  ShiftResult result;
  std::set<int> modified;
  // Each productive pass either clears every period it visits or keeps at
  // least one EV off, so portfolio size + 2 passes always suffice.
  const int max_passes = static_cast<int>(portfolio.size()) + 2;

  for (int pass = 1;; ++pass) {
    TimePoint horizon_end = now;
    for (const auto& offer : portfolio) {
      horizon_end = std::max(horizon_end, offer.departure);
    }
    const auto periods = book_overloads(book, now, horizon_end, c_max);
    if (periods.empty()) break;
    if (pass > max_passes) {
      result.iteration_bound_hit = true;
      break;
    }
    result.passes = pass;
    result.overload_periods_seen += static_cast<int>(periods.size());
    bool changed = false;

    for (const auto& period : periods) {
      const TimePoint p_from = std::max(period.start, now);
      auto still_overloaded = [&] {
        return overloaded_within(book, p_from, period.end, c_max);
      };
      if (!still_overloaded()) continue;

      struct Candidate {
        std::size_t index;
        double laxity;
        int id;
      };
      std::vector<Candidate> candidates;
      for (std::size_t i = 0; i < portfolio.size(); ++i) {
        if (charges_within(portfolio[i], p_from, period.end)) {
          candidates.push_back({i, laxity(portfolio[i], now),
                                portfolio[i].ev_id});
        }
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const Candidate& a, const Candidate& b) {
                  if (a.laxity != b.laxity) return a.laxity > b.laxity;
                  return a.id < b.id;
                });

      // Full relocations, most flexible first.
      std::vector<const Candidate*> stuck;
      for (const auto& c : candidates) {
        if (!still_overloaded()) {
          result.decisions.push_back({pass, period.start, c.id, c.laxity,
                                      ShiftDecision::Outcome::not_needed, 0.0});
          continue;
        }
        Relocation relocation(portfolio[c.index], book, c_max, prices, now);
        const double leftover = relocation.run(period);
        if (leftover > 0.0) {
          relocation.rollback();
          stuck.push_back(&c);
          result.decisions.push_back({pass, period.start, c.id, c.laxity,
                                      ShiftDecision::Outcome::not_relocatable,
                                      0.0});
          continue;
        }
        modified.insert(c.id);
        changed = true;
        result.decisions.push_back({pass, period.start, c.id, c.laxity,
                                    ShiftDecision::Outcome::relocated,
                                    relocation.removed_kwh()});
      }

      if (!stuck.empty() && still_overloaded()) {
        if (auto ids = Repack(portfolio, book, c_max, now).run()) {
          for (const int id : *ids) {
            modified.insert(id);
            result.decisions.push_back({pass, period.start, id, 0.0,
                                        ShiftDecision::Outcome::repacked, 0.0});
          }
          changed = changed || !ids->empty();
        }
      }

      // Nothing else can move: keep EVs off, again by laxity.
      for (const Candidate* c : stuck) {
        if (!still_overloaded()) break;
        Relocation relocation(portfolio[c->index], book, c_max, prices, now);
        const double dropped = relocation.run(period);
        modified.insert(c->id);
        changed = true;
        if (dropped > 0.0) {
          result.keep_offs.push_back(
              {c->id, period.start, period.end, dropped});
        }
        result.decisions.push_back(
            {pass, period.start, c->id, c->laxity,
             dropped > 0.0 ? ShiftDecision::Outcome::kept_off
                           : ShiftDecision::Outcome::relocated,
             relocation.removed_kwh() - dropped});
      }
    }
    if (!changed) break;
  }

  result.modified_ev_ids.assign(modified.begin(), modified.end());
  return result;
}

// ---------------------------------------------------------------------------

Aggregator::Aggregator(TimePoint origin, double capacity_kw, PriceLookup prices)
    : capacity_kw_(capacity_kw), prices_(std::move(prices)), book_(origin) {
  if (!(capacity_kw_ > 0.0)) {
    throw ContractError("aggregator capacity must be positive");
  }
}

void Aggregator::add_customer(int ev_id) {
  if (!customers_.emplace(ev_id, true).second) {
    throw ContractError(fmt::format("EV {} is already registered", ev_id));
  }
}

void Aggregator::add_predicted_base_load(TimePoint day_start,
                                         std::span<const double> hourly_kw) {
  if (hourly_kw.size() != 24) {
    throw ContractError("baseload forecast must have 24 hourly values");
  }
  const TimePoint expected = book_.baseload_end();
  if (day_start < expected) {
    throw ContractError("baseload forecast for " +
                        format_timestamp(day_start) + " was already received");
  }
  if (day_start > expected) {
    throw ContractError("baseload forecast for " + format_timestamp(day_start) +
                        " leaves a gap; next expected day starts " +
                        format_timestamp(expected));
  }
  book_.append_baseload(hourly_kw);
}

std::size_t Aggregator::offer_index(int ev_id) const {
  for (std::size_t i = 0; i < portfolio_.size(); ++i) {
    if (portfolio_[i].ev_id == ev_id) return i;
  }
  return portfolio_.size();
}

bool Aggregator::is_customer(int ev_id) const {
  return customers_.contains(ev_id);
}

bool Aggregator::has_active_offer(int ev_id) const {
  return offer_index(ev_id) < portfolio_.size();
}

const FlexOffer& Aggregator::active_offer(int ev_id) const {
  const auto i = offer_index(ev_id);
  if (i == portfolio_.size()) {
    throw ContractError(fmt::format("EV {} has no active offer", ev_id));
  }
  return portfolio_[i];
}

const ChargingSchedule& Aggregator::original_schedule(int ev_id) const {
  const auto it = originals_.find(ev_id);
  if (it == originals_.end()) {
    throw ContractError(fmt::format("EV {} has no active offer", ev_id));
  }
  return it->second;
}

double Aggregator::power_at(int ev_id, TimePoint t) const {
  const auto i = offer_index(ev_id);
  return i < portfolio_.size() ? portfolio_[i].schedule.power_at(t) : 0.0;
}

ShiftResult Aggregator::add_flex_offer(FlexOffer offer, TimePoint now) {
  if (!is_customer(offer.ev_id)) {
    throw ContractError(
        fmt::format("FlexOffer from unregistered EV {}", offer.ev_id));
  }
  offer.validate();
  if (has_active_offer(offer.ev_id)) {
    throw ContractError(fmt::format(
        "EV {} already has an active FlexOffer overlapping this one",
        offer.ev_id));
  }
  if (offer.plug_in < book_.origin()) {
    throw ContractError("FlexOffer starts before the aggregator origin");
  }
  book_.add_schedule(offer.schedule, +1.0, offer.plug_in);
  originals_[offer.ev_id] = offer.schedule;
  portfolio_.push_back(std::move(offer));
  return rebalance(now);
}

ShiftResult Aggregator::rebalance(TimePoint now) {
  return shift_loads(portfolio_, book_, capacity_kw_, prices_, now);
}

CompensationRecord Aggregator::unplug_ev(int ev_id, TimePoint now) {
  if (!is_customer(ev_id)) {
    throw ContractError(fmt::format("unplug of unknown EV {}", ev_id));
  }
  const auto i = offer_index(ev_id);
  if (i == portfolio_.size()) {
    throw ContractError(
        fmt::format("unplug of EV {} without an active offer", ev_id));
  }
  FlexOffer offer = std::move(portfolio_[i]);
  portfolio_.erase(portfolio_.begin() + static_cast<std::ptrdiff_t>(i));
  book_.add_schedule(offer.schedule, -1.0, now);
  for (TimePoint t = std::max(now, offer.schedule.start());
       t < offer.schedule.end(); t += minutes{1}) {
    offer.schedule[static_cast<std::size_t>((t - offer.schedule.start()).count())] =
        0.0;
  }
  auto node = originals_.extract(ev_id);
  return compensation_for(ev_id, node.mapped(), offer.schedule, prices_);
}

}  // namespace gridflex
