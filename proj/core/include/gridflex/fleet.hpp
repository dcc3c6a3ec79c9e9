#pragma once

// Residential EV fleet: vehicle specs, daily driving behaviour and battery
// state.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridflex/rng.hpp"
#include "gridflex/time.hpp"

namespace gridflex {

// Three-phase 25 A household connection.
inline constexpr double kHouseholdPowerCapKw = 17.3;
inline constexpr double kMinChargePowerKw = 7.2;

struct EvSpec {
  int id = 0;
  double battery_kwh = 0.0;
  double max_power_kw = 0.0;
  double consumption_kwh_per_km = 0.2;

  // Throws ContractError when a field is outside its legal range.
  void validate() const;
};

// Normal distribution truncated to [lo, hi] by rejection; values in minutes
// after local midnight.
struct TruncatedNormal {
  double mean = 0.0;
  double sd = 1.0;
  double lo = 0.0;
  double hi = 0.0;

  double sample(Rng& rng) const;
};

// Discrete distribution over daily driving distance in km.
class DistanceTable {
 public:
  DistanceTable() = default;
  // Probabilities must be non-negative and sum to 1 within 1e-9.
  explicit DistanceTable(std::vector<std::pair<double, double>> km_probability);

  // Documented placeholder with a mean of 40 km.
  static DistanceTable placeholder();

  double mean() const;
  double sample(Rng& rng) const;
  const std::vector<std::pair<double, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<double, double>> entries_;
  std::vector<double> cumulative_;
};

struct BehaviorModel {
  TruncatedNormal departure{7.5 * 60, 60, 5 * 60, 10 * 60};
  TruncatedNormal arrival{16.5 * 60, 90, 13 * 60, 21 * 60};
  DistanceTable distance = DistanceTable::placeholder();

  void validate() const;
};

struct DrivingDay {
  TimePoint departure;
  TimePoint arrival;
  double distance_km = 0.0;
};

// One commute for the local day starting at `day_start`. Times are rounded to
// whole minutes; departure < arrival is guaranteed by the truncation bounds.
DrivingDay sample_driving_day(const BehaviorModel& model, Rng& rng,
                              TimePoint day_start);

// Same, drawing from the (seed, ev id, day index) substream so results do not
// depend on the order in which EVs or days are sampled.
DrivingDay sample_driving_day(const BehaviorModel& model, std::uint64_t seed,
                              int ev_id, int day_index, TimePoint day_start);

struct DissatisfactionEvent {
  int ev_id = 0;
  int day_index = 0;
  double soc_at_departure = 0.0;  // fraction of capacity
};

class EvAgent {
 public:
  // Starts fully charged and plugged in at home.
  explicit EvAgent(EvSpec spec, double soc_target = 1.0);

  const EvSpec& spec() const { return spec_; }
  double soc_kwh() const { return soc_kwh_; }
  double soc_fraction() const { return soc_kwh_ / spec_.battery_kwh; }
  double soc_target() const { return soc_target_; }
  bool plugged() const { return plugged_; }
  const std::optional<DrivingDay>& today() const { return today_; }

  void set_soc(double soc_kwh);
  void set_today(DrivingDay day) { today_ = day; }
  void set_planned_departure(TimePoint t) { planned_departure_ = t; }

  // Energy to put back after today's trip: trip energy capped by the
  // remaining battery headroom.
  double energy_needed() const;

  // Lossless charging, clamped at capacity. Requires the agent to be plugged.
  void apply_charging(double energy_kwh);

  // Subtracts the trip energy (floored at empty).
  void drive();

  void plug_in(TimePoint departure);

  // Unplugs. Returns an event iff the state of charge is strictly below the
  // target; a 1e-9 kWh slack absorbs floating-point summation error.
  std::optional<DissatisfactionEvent> depart(TimePoint t, int day_index);

 private:
  EvSpec spec_;
  double soc_kwh_;
  double soc_target_;
  bool plugged_ = true;
  std::optional<DrivingDay> today_;
  std::optional<TimePoint> planned_departure_;
};

struct FleetFile {
  std::vector<EvSpec> evs;
  std::vector<std::string> warnings;
};

// CSV `id,battery_kwh,max_power_kw,consumption_kwh_per_km` with a header.
// Charge power above the household cap is clamped to it with a warning.
FleetFile load_fleet_csv(const std::filesystem::path& path);
void write_fleet_csv(const std::filesystem::path& path,
                     const std::vector<EvSpec>& evs);

}  // namespace gridflex
