#pragma once

// Deterministic minute-tick simulation of one transformer, its households
// and their EVs, with or without the aggregator.

#include <cstdint>
#include <string>
#include <vector>

#include "gridflex/aggregator.hpp"
#include "gridflex/config.hpp"
#include "gridflex/fleet.hpp"
#include "gridflex/kpi.hpp"
#include "gridflex/market_data.hpp"

namespace gridflex {

struct ScenarioData {
  PriceSeries spot;
  BaseloadProfile baseload;
  CarbonIntensitySeries intensity;
  std::vector<EvSpec> fleet;
  std::vector<std::string> warnings;
};

// Loads every file the config references. DataError names the failing file.
ScenarioData load_scenario_data(const ScenarioConfig& config);

// DataError describing the first series that does not cover the simulated
// span, or a fleet smaller than the number of adopting households.
void check_coverage(const ScenarioConfig& config, const ScenarioData& data);

struct SessionRecord {
  int ev_id = 0;
  int household = 0;
  int day_index = 0;  // day of plug-in
  TimePoint plug_in{};
  TimePoint departure{};  // planned; clipped to the end of the simulation
  bool truncated = false;  // ended by the simulation horizon, not a departure
  double required_kwh = 0.0;
  double delivered_kwh = 0.0;
  double original_cost_dkk = 0.0;  // the offered RTP schedule
  double cost_dkk = 0.0;           // what was actually charged
  double spot_cost_dkk = 0.0;
  double tariff_dkk = 0.0;
  double emissions_kg = 0.0;
  double compensation_dkk = 0.0;
  bool rescheduled = false;
};

struct EngineStats {
  long reschedule_calls = 0;
  long rescheduled_sessions = 0;
  long keep_off_events = 0;
  int max_shift_passes = 0;
  long iteration_bound_hits = 0;
  int max_concurrent_charging = 0;
};

struct SimulationResult {
  TimePoint start{};
  int days = 0;
  Strategy strategy = Strategy::aggregated;
  double capacity_kw = 0.0;
  int num_households = 0;
  int num_evs = 0;
  hours utc_offset{1};

  // One value per simulated minute.
  std::vector<double> aggregate_kw;
  std::vector<double> baseload_kw;
  std::vector<double> ev_kw;
  std::vector<std::uint16_t> charging_count;

  // days × households, row-major: peak of (baseload share + own EV) per day.
  std::vector<double> household_daily_peak_kw;
  // Distribution tariff of each simulated hour, DKK/kWh.
  std::vector<double> hourly_tariff_dkk;

  std::vector<SessionRecord> sessions;
  std::vector<CompensationRecord> compensation;  // rescheduled sessions only
  std::vector<DissatisfactionEvent> dissatisfaction;
  std::vector<std::string> event_log;
  EngineStats stats;

  std::size_t minutes() const { return aggregate_kw.size(); }
  double household_peak(int day, int household) const {
    return household_daily_peak_kw[static_cast<std::size_t>(day) *
                                       static_cast<std::size_t>(num_households) +
                                   static_cast<std::size_t>(household)];
  }
};

// Per day, in order: at local midnight the aggregator receives the next day's
// baseload forecast; every EV's commute is sampled; then minute by minute
// departures, arrivals (RTP plan → FlexOffer or direct adoption), aggregator
// rescheduling and metering. Sessions still open at the end are settled
// without a departure event.
SimulationResult run_scenario(const ScenarioConfig& config,
                              const ScenarioData& data);
SimulationResult run_scenario(const ScenarioConfig& config);

struct RunComparison {
  KpiReport baseline;
  KpiReport other;
  KpiDifference difference;
};

// ContractError when the two runs cover different spans or fleets.
RunComparison compare_runs(const SimulationResult& baseline,
                           const SimulationResult& other);

}  // namespace gridflex
