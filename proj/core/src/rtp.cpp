#include "gridflex/rtp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gridflex/error.hpp"

namespace gridflex {

ChargingSchedule::ChargingSchedule(TimePoint start, TimePoint end)
    : start_(start) {
  if (end < start) {
    throw ContractError("charging schedule ends before it starts");
  }
  power_kw_.assign(static_cast<std::size_t>((end - start).count()), 0.0);
}

double ChargingSchedule::power_at(TimePoint t) const {
  if (!contains(t)) return 0.0;
  return power_kw_[static_cast<std::size_t>((t - start_).count())];
}

double ChargingSchedule::energy_kwh() const {
  double total = 0.0;
  for (const double p : power_kw_) total += p;
  return total / 60.0;
}

double ChargingSchedule::energy_between(TimePoint from, TimePoint to) const {
  const TimePoint lo = std::max(from, start_);
  const TimePoint hi = std::min(to, end());
  double total = 0.0;
  for (TimePoint t = lo; t < hi; t += minutes{1}) {
    total += power_kw_[static_cast<std::size_t>((t - start_).count())];
  }
  return total / 60.0;
}

double ChargingSchedule::cost(const PriceLookup& prices) const {
  double total = 0.0;
  // Prices are hour-constant, so accumulate energy per hour first.
  std::size_t i = 0;
  while (i < power_kw_.size()) {
    const TimePoint t = start_ + minutes{static_cast<long>(i)};
    const TimePoint hour_end = floor_hour(t) + hours{1};
    const auto stop = std::min<std::size_t>(
        power_kw_.size(), static_cast<std::size_t>((hour_end - start_).count()));
    double energy = 0.0;
    for (std::size_t k = i; k < stop; ++k) energy += power_kw_[k];
    if (energy != 0.0) total += energy / 60.0 * prices(t);
    i = stop;
  }
  return total;
}

ChargingSchedule build_rtp_schedule(TimePoint plug_in, TimePoint departure,
                                    double energy_kwh, double max_power_kw,
                                    const PriceLookup& prices) {
  if (departure <= plug_in) {
    throw ContractError(fmt::format("RTP schedule: departure {} not after "
                                    "plug-in {}",
                                    format_timestamp(departure),
                                    format_timestamp(plug_in)));
  }
  if (energy_kwh < 0.0 || !(max_power_kw > 0.0)) {
    throw ContractError("RTP schedule: energy must be >= 0 and power > 0");
  }
  ChargingSchedule schedule(plug_in, departure);
  if (energy_kwh <= 0.0) return schedule;

  const double per_minute = max_power_kw / 60.0;
  const double window_energy =
      per_minute * static_cast<double>(schedule.size());
  if (energy_kwh >= window_energy) {
    for (std::size_t i = 0; i < schedule.size(); ++i) schedule[i] = max_power_kw;
    return schedule;
  }

  struct HourSlot {
    TimePoint begin;  // availability inside the hour
    TimePoint end;
    double price;
  };
  std::vector<HourSlot> slots;
  for (TimePoint h = floor_hour(plug_in); h < departure; h += hours{1}) {
    const TimePoint begin = std::max(h, plug_in);
    const TimePoint end = std::min(h + hours{1}, departure);
    slots.push_back({begin, end, prices(begin)});
  }
  std::stable_sort(slots.begin(), slots.end(),
                   [](const HourSlot& a, const HourSlot& b) {
                     return a.price < b.price;
                   });

  double remaining = energy_kwh;
  for (const auto& slot : slots) {
    for (TimePoint t = slot.begin; t < slot.end && remaining > 0.0;
         t += minutes{1}) {
      const double power =
          remaining >= per_minute ? max_power_kw : remaining * 60.0;
      schedule[static_cast<std::size_t>((t - plug_in).count())] = power;
      remaining -= power / 60.0;
      // Guard against a residue of a few ulps producing a spurious minute.
      if (remaining < 1e-12) remaining = 0.0;
    }
    if (remaining <= 0.0) break;
  }
  return schedule;
}

}  // namespace gridflex
