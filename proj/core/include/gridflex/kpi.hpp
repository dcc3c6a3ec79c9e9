#pragma once

// Grid and user KPIs: load factor, coincidence factor, overload severity,
// dissatisfaction, charging cost, emissions, tariff revenue and the payback
// of a transformer upgrade against aggregator compensation.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridflex/fleet.hpp"

namespace gridflex {

struct SimulationResult;

// LF = Σ C(t) / (max P(t) · N_h), with C in kWh per hour and P per minute.
// Throws ContractError when the peak is not positive or n_hours < 1.
double load_factor(std::span<const double> hourly_kwh,
                   std::span<const double> load_kw, double n_hours);

// CF = max P(t) / Σ_i max P_i(t) over one window.
double coincidence_factor(std::span<const double> aggregate_kw,
                          std::span<const std::vector<double>> individual_kw);
// Same with the peaks already reduced.
double coincidence_factor_from_peaks(double aggregate_peak_kw,
                                     std::span<const double> individual_peaks_kw);

// The number of recorded departures below target.
long dissatisfaction_total(std::span<const DissatisfactionEvent> events);

// Loading bands above nameplate (IEC 60076-7 limits for small transformers).
enum class OverloadBand {
  normal_cyclic,         // (100%, 150%]
  long_time_emergency,   // (150%, 180%]
  short_time_emergency,  // (180%, 200%]
  critical,              // > 200%
};
inline constexpr std::size_t kOverloadBandCount = 4;
const char* to_string(OverloadBand band);

// `ratio` = load / capacity, must be > 1.
OverloadBand classify_overload(double ratio);

struct OverloadStats {
  long overload_minutes = 0;
  double overload_hours = 0.0;
  std::array<long, kOverloadBandCount> band_minutes{};
  double max_peak_kw = 0.0;
};
OverloadStats overload_stats(std::span<const double> load_kw,
                             double capacity_kw);

// Per-session money and energy totals consumed by the averaging KPIs.
struct SessionTotals {
  int ev_id = 0;
  double energy_kwh = 0.0;
  double cost_dkk = 0.0;
  double spot_cost_dkk = 0.0;
  double tariff_dkk = 0.0;
  double emissions_kg = 0.0;
};

// Per-consumer DKK/kWh, then the unweighted mean over consumers that charged.
// ContractError when no energy was charged at all.
double avg_charging_cost(std::span<const SessionTotals> sessions);
// Per-consumer energy-weighted intensity, then the mean over consumers.
double avg_emissions(std::span<const SessionTotals> sessions);
double dso_tariff_revenue(std::span<const SessionTotals> sessions);

// nullopt when there is no compensation to recover the cost from.
std::optional<double> payback_years(double upgrade_cost_dkk,
                                    double annual_compensation_dkk);

struct KpiReport {
  double overload_hours = 0.0;
  double load_factor = 0.0;
  double daily_avg_coincidence_factor = 0.0;
  double avg_charging_cost = 0.0;  // DKK/kWh
  double avg_emissions = 0.0;      // kg CO2-eq/kWh
  double dso_tariff_revenue = 0.0;  // DKK
  long dissatisfaction_count = 0;
  double compensation_total = 0.0;  // DKK
  double max_peak_kw = 0.0;
  std::array<long, kOverloadBandCount> overload_band_minutes{};
  // Context, not KPIs.
  double total_charging_cost = 0.0;  // DKK
  double total_charged_kwh = 0.0;
};

// When `include_baseload_in_revenue` is set, the household baseload is billed
// at the tariff as well.
KpiReport build_kpi_report(const SimulationResult& result,
                           bool include_baseload_in_revenue = false);

// Relative change (b − a) / a in percent, per KPI. A zero baseline gives 0
// when both are zero and nullopt otherwise.
struct KpiDifference {
  std::optional<double> overload_hours;
  std::optional<double> load_factor;
  std::optional<double> daily_avg_coincidence_factor;
  std::optional<double> avg_charging_cost;
  std::optional<double> avg_emissions;
  std::optional<double> dso_tariff_revenue;
  std::optional<double> dissatisfaction_count;
  std::optional<double> compensation_total;
  std::optional<double> max_peak_kw;
};
std::optional<double> percent_difference(double baseline, double other);
KpiDifference kpi_difference(const KpiReport& baseline, const KpiReport& other);

}  // namespace gridflex
