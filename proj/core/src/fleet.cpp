#include "gridflex/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "gridflex/csv.hpp"
#include "gridflex/error.hpp"

namespace gridflex {

void EvSpec::validate() const {
  if (!(battery_kwh > 0.0)) {
    throw ContractError(
        fmt::format("EV {}: battery capacity must be positive", id));
  }
  if (!(consumption_kwh_per_km > 0.0)) {
    throw ContractError(fmt::format("EV {}: consumption must be positive", id));
  }
  if (max_power_kw < kMinChargePowerKw - 1e-9 ||
      max_power_kw > kHouseholdPowerCapKw + 1e-9) {
    throw ContractError(fmt::format(
        "EV {}: charge power {} kW outside [{}, {}] kW", id, max_power_kw,
        kMinChargePowerKw, kHouseholdPowerCapKw));
  }
}

double TruncatedNormal::sample(Rng& rng) const {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = rng.normal(mean, sd);
    if (x >= lo && x <= hi) return x;
  }
  // Only reachable for bounds far out in a tail.
  return std::clamp(mean, lo, hi);
}

DistanceTable::DistanceTable(
    std::vector<std::pair<double, double>> km_probability)
    : entries_(std::move(km_probability)) {
  if (entries_.empty()) {
    throw ConfigError("distance table is empty");
  }
  double total = 0.0;
  for (const auto& [km, p] : entries_) {
    if (!(km >= 0.0) || !(p >= 0.0)) {
      throw ConfigError(
          fmt::format("distance table entry {} km : {} is negative", km, p));
    }
    total += p;
    cumulative_.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError(
        fmt::format("distance table probabilities sum to {}, not 1", total));
  }
}

DistanceTable DistanceTable::placeholder() {
  return DistanceTable({{2, 0.06},
                        {5, 0.10},
                        {10, 0.14},
                        {20, 0.18},
                        {30, 0.14},
                        {40, 0.12},
                        {60, 0.10},
                        {90, 0.09},
                        {146, 0.05},
                        {199, 0.02}});
}

double DistanceTable::mean() const {
  double m = 0.0;
  for (const auto& [km, p] : entries_) m += km * p;
  return m;
}

double DistanceTable::sample(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto index = std::min<std::size_t>(
      static_cast<std::size_t>(it - cumulative_.begin()), entries_.size() - 1);
  return entries_[index].first;
}

void BehaviorModel::validate() const {
  for (const auto* d : {&departure, &arrival}) {
    if (!(d->sd > 0.0) || !(d->lo <= d->hi) || d->lo < 0.0 ||
        d->hi >= 24 * 60) {
      throw ConfigError("behaviour model: invalid truncated normal bounds");
    }
  }
  if (!(departure.hi < arrival.lo)) {
    throw ConfigError(
        "behaviour model: latest departure must precede earliest arrival");
  }
  if (distance.entries().empty()) {
    throw ConfigError("behaviour model: distance table is empty");
  }
}

DrivingDay sample_driving_day(const BehaviorModel& model, Rng& rng,
                              TimePoint day_start) {
  const double departure_min = std::round(model.departure.sample(rng));
  const double arrival_min = std::round(model.arrival.sample(rng));
  const double km = model.distance.sample(rng);
  return DrivingDay{
      day_start + minutes{static_cast<long>(departure_min)},
      day_start + minutes{static_cast<long>(arrival_min)},
      km,
  };
}

DrivingDay sample_driving_day(const BehaviorModel& model, std::uint64_t seed,
                              int ev_id, int day_index, TimePoint day_start) {
  Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(ev_id),
                           static_cast<std::uint64_t>(day_index));
  return sample_driving_day(model, rng, day_start);
}

// ---------------------------------------------------------------------------

EvAgent::EvAgent(EvSpec spec, double soc_target)
    : spec_(spec), soc_kwh_(spec.battery_kwh), soc_target_(soc_target) {
  spec_.validate();
  if (!(soc_target_ > 0.0 && soc_target_ <= 1.0)) {
    throw ContractError("SoC target must lie in (0, 1]");
  }
}

void EvAgent::set_soc(double soc_kwh) {
  if (soc_kwh < 0.0 || soc_kwh > spec_.battery_kwh) {
    throw ContractError(fmt::format("EV {}: SoC {} kWh outside [0, {}]",
                                    spec_.id, soc_kwh, spec_.battery_kwh));
  }
  soc_kwh_ = soc_kwh;
}

double EvAgent::energy_needed() const {
  if (!today_) {
    throw ContractError(
        fmt::format("EV {}: no driving day sampled yet", spec_.id));
  }
  const double trip = today_->distance_km * spec_.consumption_kwh_per_km;
  return std::max(0.0, std::min(trip, spec_.battery_kwh - soc_kwh_));
}

void EvAgent::apply_charging(double energy_kwh) {
  if (energy_kwh < 0.0) {
    throw ContractError(
        fmt::format("EV {}: negative charging energy {}", spec_.id, energy_kwh));
  }
  if (!plugged_) {
    throw ContractError(
        fmt::format("EV {}: cannot charge while unplugged", spec_.id));
  }
  soc_kwh_ = std::min(soc_kwh_ + energy_kwh, spec_.battery_kwh);
}

void EvAgent::drive() {
  if (!today_) {
    throw ContractError(
        fmt::format("EV {}: no driving day sampled yet", spec_.id));
  }
  const double trip = today_->distance_km * spec_.consumption_kwh_per_km;
  soc_kwh_ = std::max(0.0, soc_kwh_ - trip);
}

void EvAgent::plug_in(TimePoint departure) {
  if (plugged_) {
    throw ContractError(fmt::format("EV {}: already plugged in", spec_.id));
  }
  plugged_ = true;
  planned_departure_ = departure;
}

std::optional<DissatisfactionEvent> EvAgent::depart(TimePoint t,
                                                    int day_index) {
  if (!plugged_) {
    throw ContractError(
        fmt::format("EV {}: departing while already unplugged", spec_.id));
  }
  if (planned_departure_ && *planned_departure_ != t) {
    throw ContractError(fmt::format("EV {}: departure at {} but planned {}",
                                    spec_.id, format_timestamp(t),
                                    format_timestamp(*planned_departure_)));
  }
  plugged_ = false;
  planned_departure_.reset();
  const double target_kwh = soc_target_ * spec_.battery_kwh;
  if (soc_kwh_ < target_kwh - 1e-9) {
    return DissatisfactionEvent{spec_.id, day_index, soc_fraction()};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

FleetFile load_fleet_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  const std::string file = path.filename().string();
  FleetFile fleet;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = csv::trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const std::string context = fmt::format("{}: row {}", file, i + 1);
    const auto fields = csv::split(line);
    if (fields.size() != 4) {
      throw DataError(context + ": expected 4 fields "
                                "(id,battery_kwh,max_power_kw,"
                                "consumption_kwh_per_km)");
    }
    EvSpec spec;
    spec.id = static_cast<int>(csv::parse_int(fields[0], context));
    spec.battery_kwh = csv::parse_double(fields[1], context);
    spec.max_power_kw = csv::parse_double(fields[2], context);
    spec.consumption_kwh_per_km = csv::parse_double(fields[3], context);
    if (spec.max_power_kw > kHouseholdPowerCapKw) {
      fleet.warnings.push_back(fmt::format(
          "{}: EV {} max power {} kW exceeds the {} kW household limit; "
          "clamped to {}",
          context, spec.id, spec.max_power_kw, kHouseholdPowerCapKw,
          kHouseholdPowerCapKw));
      spec.max_power_kw = kHouseholdPowerCapKw;
    }
    try {
      spec.validate();
    } catch (const ContractError& e) {
      throw DataError(context + ": " + e.what());
    }
    for (const auto& other : fleet.evs) {
      if (other.id == spec.id) {
        throw DataError(fmt::format("{}: duplicate EV id {}", context, spec.id));
      }
    }
    fleet.evs.push_back(spec);
  }
  return fleet;
}

void write_fleet_csv(const std::filesystem::path& path,
                     const std::vector<EvSpec>& evs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "id,battery_kwh,max_power_kw,consumption_kwh_per_km\n";
  for (const auto& ev : evs) {
    out << fmt::format("{},{},{},{}\n", ev.id, ev.battery_kwh, ev.max_power_kw,
                       ev.consumption_kwh_per_km);
  }
}

}  // namespace gridflex
