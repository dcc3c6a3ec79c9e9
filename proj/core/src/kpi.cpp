#include "gridflex/kpi.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "gridflex/engine.hpp"
#include "gridflex/error.hpp"

namespace gridflex {

double load_factor(std::span<const double> hourly_kwh,
                   std::span<const double> load_kw, double n_hours) {
  if (n_hours < 1.0) {
    throw ContractError(fmt::format("load factor needs n_hours >= 1, got {}", n_hours));
  }
  if (load_kw.empty()) throw ContractError("load factor of an empty profile");
  const double peak = *std::max_element(load_kw.begin(), load_kw.end());
  if (!(peak > 0.0)) {
    throw ContractError(fmt::format("load factor needs a positive peak, got {}", peak));
  }
  const double energy = std::accumulate(hourly_kwh.begin(), hourly_kwh.end(), 0.0);
  return energy / (peak * n_hours);
}

double coincidence_factor_from_peaks(double aggregate_peak_kw,
                                     std::span<const double> individual_peaks_kw) {
  const double sum = std::accumulate(individual_peaks_kw.begin(),
                                     individual_peaks_kw.end(), 0.0);
  if (!(sum > 0.0)) {
    throw ContractError("coincidence factor needs a positive sum of individual peaks");
  }
  return aggregate_peak_kw / sum;
}

double coincidence_factor(std::span<const double> aggregate_kw,
                          std::span<const std::vector<double>> individual_kw) {
  if (aggregate_kw.empty()) throw ContractError("coincidence factor of an empty window");
  std::vector<double> peaks;
  peaks.reserve(individual_kw.size());
  for (const auto& p : individual_kw) {
    if (p.size() != aggregate_kw.size()) {
      throw ContractError("individual profile length differs from the aggregate");
    }
    peaks.push_back(*std::max_element(p.begin(), p.end()));
  }
  return coincidence_factor_from_peaks(
      *std::max_element(aggregate_kw.begin(), aggregate_kw.end()), peaks);
}

long dissatisfaction_total(std::span<const DissatisfactionEvent> events) {
  return static_cast<long>(events.size());
}

const char* to_string(OverloadBand band) {
  switch (band) {
    case OverloadBand::normal_cyclic: return "normal_cyclic";
    case OverloadBand::long_time_emergency: return "long_time_emergency";
    case OverloadBand::short_time_emergency: return "short_time_emergency";
    case OverloadBand::critical: return "critical";
  }
  return "unknown";
}

OverloadBand classify_overload(double ratio) {
  if (!(ratio > 1.0)) {
    throw ContractError(fmt::format("loading ratio {} is not an overload", ratio));
  }
  if (ratio <= 1.5) return OverloadBand::normal_cyclic;
  if (ratio <= 1.8) return OverloadBand::long_time_emergency;
  if (ratio <= 2.0) return OverloadBand::short_time_emergency;
  return OverloadBand::critical;
}

OverloadStats overload_stats(std::span<const double> load_kw, double capacity_kw) {
  if (!(capacity_kw > 0.0)) throw ContractError("capacity must be positive");
  OverloadStats stats;
  for (const double l : load_kw) {
    stats.max_peak_kw = std::max(stats.max_peak_kw, l);
    if (l > capacity_kw) {
      ++stats.overload_minutes;
      ++stats.band_minutes[static_cast<std::size_t>(classify_overload(l / capacity_kw))];
    }
  }
  stats.overload_hours = static_cast<double>(stats.overload_minutes) / 60.0;
  return stats;
}

namespace {

struct ConsumerSums {
  double energy = 0.0;
  double cost = 0.0;
  double emissions = 0.0;
};

std::map<int, ConsumerSums> per_consumer(std::span<const SessionTotals> sessions) {
  std::map<int, ConsumerSums> out;
  for (const auto& s : sessions) {
    auto& c = out[s.ev_id];
    c.energy += s.energy_kwh;
    c.cost += s.cost_dkk;
    c.emissions += s.emissions_kg;
  }
  return out;
}

template <class Field>
double consumer_mean(std::span<const SessionTotals> sessions, Field field) {
  double sum = 0.0;
  int n = 0;
  for (const auto& [id, c] : per_consumer(sessions)) {
    if (c.energy <= 0.0) continue;
    sum += field(c) / c.energy;
    ++n;
  }
  if (n == 0) throw ContractError("no consumer charged any energy");
  return sum / n;
}

}  // namespace

double avg_charging_cost(std::span<const SessionTotals> sessions) {
  return consumer_mean(sessions, [](const ConsumerSums& c) { return c.cost; });
}

double avg_emissions(std::span<const SessionTotals> sessions) {
  return consumer_mean(sessions, [](const ConsumerSums& c) { return c.emissions; });
}

double dso_tariff_revenue(std::span<const SessionTotals> sessions) {
  double sum = 0.0;
  for (const auto& s : sessions) sum += s.tariff_dkk;
  return sum;
}

std::optional<double> payback_years(double upgrade_cost_dkk,
                                    double annual_compensation_dkk) {
  if (upgrade_cost_dkk < 0.0) throw ContractError("upgrade cost must be >= 0");
  if (annual_compensation_dkk < 0.0) throw ContractError("compensation must be >= 0");
  if (annual_compensation_dkk == 0.0) return std::nullopt;
  return upgrade_cost_dkk / annual_compensation_dkk;
}

KpiReport build_kpi_report(const SimulationResult& result,
                           bool include_baseload_in_revenue) {
  const std::size_t n = result.minutes();
  if (n == 0 || n % kMinutesPerDay.count() != 0) {
    throw ContractError("simulation result does not span whole days");
  }
  KpiReport report;

  const auto stats = overload_stats(result.aggregate_kw, result.capacity_kw);
  report.overload_hours = stats.overload_hours;
  report.max_peak_kw = stats.max_peak_kw;
  report.overload_band_minutes = stats.band_minutes;

  const std::size_t n_hours = n / 60;
  std::vector<double> hourly(n_hours, 0.0);
  for (std::size_t i = 0; i < n; ++i) hourly[i / 60] += result.aggregate_kw[i] / 60.0;
  report.load_factor = load_factor(hourly, result.aggregate_kw, static_cast<double>(n_hours));

  const auto per_day = static_cast<std::size_t>(kMinutesPerDay.count());
  const auto households = static_cast<std::size_t>(result.num_households);
  double cf_sum = 0.0;
  for (int d = 0; d < result.days; ++d) {
    const auto first = result.aggregate_kw.begin() +
                       static_cast<std::ptrdiff_t>(static_cast<std::size_t>(d) * per_day);
    const double peak = *std::max_element(first, first + static_cast<std::ptrdiff_t>(per_day));
    const std::span<const double> peaks(
        result.household_daily_peak_kw.data() + static_cast<std::size_t>(d) * households,
        households);
    cf_sum += coincidence_factor_from_peaks(peak, peaks);
  }
  report.daily_avg_coincidence_factor = cf_sum / result.days;

  std::vector<SessionTotals> totals;
  totals.reserve(result.sessions.size());
  for (const auto& s : result.sessions) {
    totals.push_back({s.ev_id, s.delivered_kwh, s.cost_dkk, s.spot_cost_dkk,
                      s.tariff_dkk, s.emissions_kg});
    report.total_charging_cost += s.cost_dkk;
    report.total_charged_kwh += s.delivered_kwh;
  }
  if (report.total_charged_kwh > 0.0) {
    report.avg_charging_cost = avg_charging_cost(totals);
    report.avg_emissions = avg_emissions(totals);
  }
  report.dso_tariff_revenue = dso_tariff_revenue(totals);
  if (include_baseload_in_revenue) {
    for (std::size_t i = 0; i < n; ++i) {
      report.dso_tariff_revenue +=
          result.baseload_kw[i] / 60.0 * result.hourly_tariff_dkk[i / 60];
    }
  }
  report.dissatisfaction_count = dissatisfaction_total(result.dissatisfaction);
  for (const auto& c : result.compensation) report.compensation_total += c.compensation_dkk;
  return report;
}

std::optional<double> percent_difference(double baseline, double other) {
  if (baseline == 0.0) {
    if (other == 0.0) return 0.0;
    return std::nullopt;
  }
  return (other - baseline) / baseline * 100.0;
}

KpiDifference kpi_difference(const KpiReport& a, const KpiReport& b) {
  KpiDifference d;
  d.overload_hours = percent_difference(a.overload_hours, b.overload_hours);
  d.load_factor = percent_difference(a.load_factor, b.load_factor);
  d.daily_avg_coincidence_factor =
      percent_difference(a.daily_avg_coincidence_factor, b.daily_avg_coincidence_factor);
  d.avg_charging_cost = percent_difference(a.avg_charging_cost, b.avg_charging_cost);
  d.avg_emissions = percent_difference(a.avg_emissions, b.avg_emissions);
  d.dso_tariff_revenue = percent_difference(a.dso_tariff_revenue, b.dso_tariff_revenue);
  d.dissatisfaction_count =
      percent_difference(static_cast<double>(a.dissatisfaction_count),
                         static_cast<double>(b.dissatisfaction_count));
  d.compensation_total = percent_difference(a.compensation_total, b.compensation_total);
  d.max_peak_kw = percent_difference(a.max_peak_kw, b.max_peak_kw);
  return d;
}

}  // namespace gridflex
