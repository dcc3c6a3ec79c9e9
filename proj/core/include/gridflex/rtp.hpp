#pragma once

// Decentralized price-following charging: each EV fills the cheapest hours
// before its departure.

#include <functional>
#include <span>
#include <vector>

#include "gridflex/time.hpp"

namespace gridflex {

// DKK/kWh for the hour containing the given instant.
using PriceLookup = std::function<double(TimePoint)>;

// Per-minute charging power over a plug-in session [start, end).
class ChargingSchedule {
 public:
  ChargingSchedule() = default;
  ChargingSchedule(TimePoint start, TimePoint end);

  TimePoint start() const { return start_; }
  TimePoint end() const { return start_ + minutes{static_cast<long>(power_kw_.size())}; }
  std::size_t size() const { return power_kw_.size(); }
  bool contains(TimePoint t) const { return t >= start_ && t < end(); }

  // 0 outside the session.
  double power_at(TimePoint t) const;
  double operator[](std::size_t minute) const { return power_kw_[minute]; }
  double& operator[](std::size_t minute) { return power_kw_[minute]; }
  std::span<const double> power_kw() const { return power_kw_; }

  double energy_kwh() const;
  // Energy scheduled within [from, to) ∩ session.
  double energy_between(TimePoint from, TimePoint to) const;

  // Σ power × 1/60 h × price(minute).
  double cost(const PriceLookup& prices) const;

  friend bool operator==(const ChargingSchedule&,
                         const ChargingSchedule&) = default;

 private:
  TimePoint start_{};
  std::vector<double> power_kw_;
};

// Hours overlapping [plug_in, departure) are ranked by price (ties: earlier
// first) and filled at `max_power_kw` from the start of the EV's availability
// inside each hour. The final minute runs at reduced power so the delivered
// energy is exact. When the window is too short the whole window runs at full
// power. Throws ContractError when departure <= plug_in or an argument is
// negative.
ChargingSchedule build_rtp_schedule(TimePoint plug_in, TimePoint departure,
                                    double energy_kwh, double max_power_kw,
                                    const PriceLookup& prices);

}  // namespace gridflex
