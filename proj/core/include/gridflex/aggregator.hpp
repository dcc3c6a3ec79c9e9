#pragma once

// DSO-operated aggregator: collects baseload forecasts and FlexOffers, finds
// forecast transformer overloads and moves charging out of them, most
// flexible (highest laxity) EV first.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gridflex/rtp.hpp"
#include "gridflex/time.hpp"

namespace gridflex {

struct FlexOffer {
  int ev_id = 0;
  TimePoint plug_in{};
  TimePoint departure{};  // planned
  double max_power_kw = 0.0;
  double required_energy_kwh = 0.0;
  ChargingSchedule schedule;  // current; rewritten by the aggregator

  // Schedule window must equal [plug_in, departure) and no slot may exceed
  // max_power_kw. Throws ContractError otherwise.
  void validate() const;
};

// Minute-resolution view of L_t = B_t + Σ EV schedules over [start, start+n).
struct LoadForecast {
  TimePoint start{};
  std::vector<double> baseload_kw;
  std::vector<double> ev_kw;

  std::size_t size() const { return baseload_kw.size(); }
  double at(std::size_t minute) const {
    return baseload_kw[minute] + ev_kw[minute];
  }
};

struct OverloadPeriod {
  TimePoint start{};
  TimePoint end{};  // exclusive
  double peak_kw = 0.0;
  double excess_kwh = 0.0;

  minutes duration() const { return end - start; }
};

struct CompensationRecord {
  int ev_id = 0;
  TimePoint session_start{};
  double original_cost_dkk = 0.0;
  double shifted_cost_dkk = 0.0;
  double compensation_dkk = 0.0;
};

// Maximal runs of minutes with load strictly above `c_max`, by start time.
std::vector<OverloadPeriod> detect_overloads(const LoadForecast& forecast,
                                             double c_max);

// Slack between finishing the remaining energy at full power and the planned
// departure, in minutes, floored at 0. Remaining energy is the requirement
// minus what the schedule delivered before `now`.
double laxity(const FlexOffer& offer, TimePoint now);

// Both schedules must cover the same session window (ContractError
// otherwise). compensation = max(0, shifted − original).
CompensationRecord compensation_for(int ev_id, const ChargingSchedule& original,
                                    const ChargingSchedule& shifted,
                                    const PriceLookup& prices);

// Working forecast shared by the aggregator and shift_loads. Baseload is
// hour-constant; the EV part is the sum of all registered schedules.
class LoadBook {
 public:
  explicit LoadBook(TimePoint origin) : origin_(origin) {}

  TimePoint origin() const { return origin_; }
  // First minute without a baseload forecast.
  TimePoint baseload_end() const {
    return origin_ + minutes{static_cast<long>(baseload_.size())};
  }

  // Appends one value per hour starting at baseload_end().
  void append_baseload(std::span<const double> hourly_kw);
  // Replaces the baseload with a per-minute series starting at origin.
  void set_baseload_minutes(std::vector<double> minute_kw);

  double baseload_at(TimePoint t) const;
  double ev_at(TimePoint t) const;
  double load_at(TimePoint t) const { return baseload_at(t) + ev_at(t); }

  // Adds `sign` × schedule over minutes >= from.
  void add_schedule(const ChargingSchedule& schedule, double sign,
                    TimePoint from);
  void add_power(TimePoint t, double delta_kw);

  LoadForecast snapshot(TimePoint from, TimePoint to) const;

 private:
  std::size_t index(TimePoint t) const;
  void ensure(std::size_t size);

  TimePoint origin_;
  std::vector<double> baseload_;  // per minute
  std::vector<double> ev_;        // per minute
};

struct KeepOffEvent {
  int ev_id = 0;
  TimePoint period_start{};
  TimePoint period_end{};
  double dropped_kwh = 0.0;
};

// One EV decision inside an overload period, kept for auditing and tests.
struct ShiftDecision {
  int pass = 0;
  TimePoint period_start{};
  int ev_id = 0;
  double laxity_min = 0.0;
  enum class Outcome {
    relocated,
    not_relocatable,
    kept_off,
    not_needed,
    repacked,
  } outcome;
  double moved_kwh = 0.0;
};

struct ShiftResult {
  std::vector<int> modified_ev_ids;  // sorted, unique
  std::vector<KeepOffEvent> keep_offs;
  std::vector<ShiftDecision> decisions;
  int passes = 0;
  int overload_periods_seen = 0;
  bool iteration_bound_hit = false;
};

// Clears forecast overloads in [now, latest departure) by rewriting the
// schedules in `portfolio` and updating `book` to match. For each overload
// period the EVs charging in it are visited by descending laxity (ties by
// ascending id): the EV's power inside the period is zeroed and the energy is
// placed first in free minutes of the same hour searching backward from the
// hour's end, then in the cheapest remaining hours before departure. An EV
// whose energy cannot be placed in full is skipped while another candidate
// can still be moved. If the period remains overloaded after that, small
// portfolios (up to six active EVs) are re-planned together by an exhaustive
// search on 15-minute chunks; only when that also fails are the candidates
// kept off in laxity order (their unplaced energy is dropped).
// The pass repeats until no overload remains or no EV can change.
//
// `book` must already contain every portfolio schedule from `now` onwards.
ShiftResult shift_loads(std::vector<FlexOffer>& portfolio, LoadBook& book,
                        double c_max, const PriceLookup& prices,
                        TimePoint now);

class Aggregator {
 public:
  Aggregator(TimePoint origin, double capacity_kw, PriceLookup prices);

  // Full participation: every EV is registered up front.
  void add_customer(int ev_id);
  // Forecast for the 24 hours starting at `day_start`, which must be the
  // first day not yet forecast (ContractError on duplicates and gaps).
  void add_predicted_base_load(TimePoint day_start,
                               std::span<const double> hourly_kw);
  // Registers the offer and clears any resulting forecast overload. The
  // result lists every EV whose schedule changed, not only the new one.
  ShiftResult add_flex_offer(FlexOffer offer, TimePoint now);
  // Re-runs the overload check, e.g. after a new baseload forecast.
  ShiftResult rebalance(TimePoint now);
  // Drops the EV's future schedule from the forecast and settles its
  // compensation against the schedule it originally offered.
  CompensationRecord unplug_ev(int ev_id, TimePoint now);

  bool is_customer(int ev_id) const;
  bool has_active_offer(int ev_id) const;
  const FlexOffer& active_offer(int ev_id) const;
  const ChargingSchedule& original_schedule(int ev_id) const;
  // Current scheduled power, 0 when the EV has no active offer.
  double power_at(int ev_id, TimePoint t) const;

  std::size_t customer_count() const { return customers_.size(); }
  std::size_t active_count() const { return portfolio_.size(); }
  const std::vector<FlexOffer>& portfolio() const { return portfolio_; }
  const LoadBook& book() const { return book_; }
  double capacity_kw() const { return capacity_kw_; }

  LoadForecast forecast(TimePoint from, TimePoint to) const {
    return book_.snapshot(from, to);
  }

 private:
  std::size_t offer_index(int ev_id) const;

  double capacity_kw_;
  PriceLookup prices_;
  LoadBook book_;
  std::map<int, bool> customers_;
  std::vector<FlexOffer> portfolio_;
  std::map<int, ChargingSchedule> originals_;
};

}  // namespace gridflex
