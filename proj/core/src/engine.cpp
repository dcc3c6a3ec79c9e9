#include "gridflex/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gridflex/error.hpp"
#include "gridflex/rng.hpp"

namespace gridflex {

ScenarioData load_scenario_data(const ScenarioConfig& config) {
  auto spot = load_hourly_csv<PriceSeries>(config.spot_csv);
  auto baseload = load_hourly_csv<BaseloadProfile>(config.baseload_csv);
  auto intensity = load_hourly_csv<CarbonIntensitySeries>(config.intensity_csv);
  auto fleet = load_fleet_csv(config.fleet_csv);
  return ScenarioData{std::move(spot), std::move(baseload),
                      std::move(intensity), std::move(fleet.evs),
                      std::move(fleet.warnings)};
}

namespace {

template <class Series>
void require_coverage(const Series& series, const char* name,
                      const ScenarioConfig& config) {
  const TimePoint from = config.start;
  const TimePoint to = config.end();
  if (series.start() > from) {
    throw DataError(fmt::format(
        "{} series starts at {} but the simulation starts at {} ({} h missing)",
        name, format_timestamp(series.start()), format_timestamp(from),
        std::chrono::duration_cast<hours>(series.start() - from).count()));
  }
  if (series.end() < to) {
    throw DataError(fmt::format(
        "{} series ends at {} but the simulation runs until {} ({} h missing)",
        name, format_timestamp(series.end()), format_timestamp(to),
        std::chrono::duration_cast<hours>(to - series.end()).count()));
  }
}

int adopter_count(const ScenarioConfig& config) {
  return static_cast<int>(
      std::lround(config.ev_adoption * config.num_households));
}

// Households that own an EV, ascending. All of them at full adoption;
// otherwise a seeded shuffle picks the subset.
std::vector<int> adopting_households(const ScenarioConfig& config) {
  std::vector<int> order(static_cast<std::size_t>(config.num_households));
  std::iota(order.begin(), order.end(), 0);
  const int k = adopter_count(config);
  if (k < config.num_households) {
    Rng rng = Rng::substream(config.seed, 0xad07ULL, 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
  }
  return order;
}

std::string charging_runs(const ChargingSchedule& s, hours utc_offset) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] <= 0.0) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < s.size() && s[i] > 0.0) ++i;
    auto clock = [&](std::size_t k) {
      const TimePoint t = s.start() + minutes{static_cast<long>(k)} + utc_offset;
      const auto since = t - std::chrono::floor<std::chrono::days>(t);
      return fmt::format("{:02}:{:02}", since.count() / 60, since.count() % 60);
    };
    if (!out.empty()) out += ',';
    out += clock(begin) + "-" + clock(i);
  }
  return out.empty() ? "-" : out;
}

struct EvState {
  EvAgent agent;
  int household = 0;
  bool in_session = false;
  SessionRecord session;
  ChargingSchedule schedule;  // baseline mode: the adopted plan
  const ChargingSchedule* live = nullptr;  // the schedule being executed
};

}  // namespace

void check_coverage(const ScenarioConfig& config, const ScenarioData& data) {
  require_coverage(data.spot, "spot", config);
  require_coverage(data.baseload, "baseload", config);
  require_coverage(data.intensity, "intensity", config);
  const int needed = adopter_count(config);
  if (static_cast<int>(data.fleet.size()) < needed) {
    throw DataError(fmt::format(
        "fleet file defines {} EVs but {} households adopt an EV",
        data.fleet.size(), needed));
  }
}

SimulationResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  return run_scenario(config, load_scenario_data(config));
}

SimulationResult run_scenario(const ScenarioConfig& config,
                              const ScenarioData& data) {
  config.validate();
  check_coverage(config, data);

  const TariffSchedule tariff = config.tariff();
  const TimePoint start = config.start;
  const TimePoint end = config.end();
  const auto total_minutes = static_cast<std::size_t>((end - start).count());
  const std::size_t total_hours = total_minutes / 60;
  const bool aggregated = config.strategy == Strategy::aggregated;
  const int households = config.num_households;

  SimulationResult result;
  result.start = start;
  result.days = config.days;
  result.strategy = config.strategy;
  result.capacity_kw = config.transformer_capacity_kw;
  result.num_households = households;
  result.utc_offset = config.utc_offset;
  result.aggregate_kw.assign(total_minutes, 0.0);
  result.baseload_kw.assign(total_minutes, 0.0);
  result.ev_kw.assign(total_minutes, 0.0);
  result.charging_count.assign(total_minutes, 0);
  result.household_daily_peak_kw.assign(
      static_cast<std::size_t>(config.days) * static_cast<std::size_t>(households),
      0.0);

  std::vector<double> price_h(total_hours);
  std::vector<double> spot_h(total_hours);
  std::vector<double> intensity_h(total_hours);
  std::vector<double> baseload_h(total_hours);
  result.hourly_tariff_dkk.resize(total_hours);
  for (std::size_t h = 0; h < total_hours; ++h) {
    const TimePoint t = start + hours{static_cast<long>(h)};
    spot_h[h] = data.spot.at(t);
    result.hourly_tariff_dkk[h] = tariff.rate_dkk(t);
    price_h[h] = spot_h[h] + result.hourly_tariff_dkk[h];
    intensity_h[h] = data.intensity.at(t);
    baseload_h[h] = data.baseload.at(t);
  }
  const PriceLookup prices = [&](TimePoint t) {
    if (t >= start && t < end) {
      return price_h[static_cast<std::size_t>(
          std::chrono::duration_cast<hours>(t - start).count())];
    }
    return total_price(data.spot, tariff, t);
  };

  const auto adopters = adopting_households(config);
  std::vector<EvState> evs;
  evs.reserve(adopters.size());
  for (std::size_t j = 0; j < adopters.size(); ++j) {
    evs.push_back(EvState{EvAgent(data.fleet[j], config.soc_target),
                          adopters[j], false, {}, {}, nullptr});
  }
  result.num_evs = static_cast<int>(evs.size());

  Aggregator aggregator(start, config.transformer_capacity_kw, prices);
  if (aggregated) {
    for (const auto& ev : evs) aggregator.add_customer(ev.agent.spec().id);
  }
  auto refresh_live = [&] {
    for (auto& ev : evs) {
      if (ev.in_session) {
        ev.live = &aggregator.active_offer(ev.agent.spec().id).schedule;
      }
    }
  };
  auto log = [&](TimePoint t, const std::string& text) {
    result.event_log.push_back(format_timestamp(t) + " " + text);
  };

  auto note_shift = [&](TimePoint t, const ShiftResult& shift,
                        int trigger_ev) {
    ++result.stats.reschedule_calls;
    result.stats.max_shift_passes =
        std::max(result.stats.max_shift_passes, shift.passes);
    if (shift.iteration_bound_hit) ++result.stats.iteration_bound_hits;
    result.stats.keep_off_events += static_cast<long>(shift.keep_offs.size());
    if (shift.modified_ev_ids.empty()) return;
    log(t, fmt::format("reschedule trigger_ev={} passes={} modified={} "
                       "keep_offs={}",
                       trigger_ev, shift.passes, shift.modified_ev_ids.size(),
                       shift.keep_offs.size()));
    for (const int id : shift.modified_ev_ids) {
      double moved = 0.0;
      for (const auto& d : shift.decisions) {
        if (d.ev_id == id) moved += d.moved_kwh;
      }
      const auto& offer = aggregator.active_offer(id);
      log(t, fmt::format("schedule ev={} moved_kwh={:.3f} energy_kwh={:.3f} "
                         "charging={}",
                         id, moved, offer.schedule.energy_kwh(),
                         charging_runs(offer.schedule, config.utc_offset)));
      for (auto& ev : evs) {
        if (ev.agent.spec().id == id && ev.in_session) {
          ev.session.rescheduled = true;
        }
      }
    }
    for (const auto& k : shift.keep_offs) {
      log(t, fmt::format("keep_off ev={} dropped_kwh={:.3f} period={}..{}",
                         k.ev_id, k.dropped_kwh, format_timestamp(k.period_start),
                         format_timestamp(k.period_end)));
    }
  };

  auto settle = [&](EvState& ev, TimePoint t) {
    SessionRecord& s = ev.session;
    if (aggregated) {
      const auto record = aggregator.unplug_ev(ev.agent.spec().id, t);
      s.compensation_dkk = record.compensation_dkk;
      if (s.rescheduled) result.compensation.push_back(record);
    }
    result.sessions.push_back(s);
    ev.in_session = false;
    ev.live = nullptr;
    if (aggregated) refresh_live();
  };

  auto forecast_day = [&](int day) {
    const TimePoint day_start = start + kMinutesPerDay * day;
    aggregator.add_predicted_base_load(
        day_start, baseload_forecast(data.baseload, day_start));
  };
  if (aggregated) {
    forecast_day(0);
    if (config.days > 1) forecast_day(1);
  }

  // Each EV starts the year at home, full, until its first departure.
  std::vector<DrivingDay> today(evs.size());
  for (std::size_t i = 0; i < evs.size(); ++i) {
    today[i] = sample_driving_day(config.behavior, config.seed,
                                  evs[i].agent.spec().id, 0, start);
    evs[i].agent.set_planned_departure(today[i].departure);
  }

  std::size_t minute_index = 0;
  for (int d = 0; d < config.days; ++d) {
    const TimePoint day_start = start + kMinutesPerDay * d;
    if (d > 0) {
      for (std::size_t i = 0; i < evs.size(); ++i) {
        today[i] = sample_driving_day(config.behavior, config.seed,
                                      evs[i].agent.spec().id, d, day_start);
      }
      if (aggregated) {
        if (d + 1 < config.days) forecast_day(d + 1);
        note_shift(day_start, aggregator.rebalance(day_start), -1);
        refresh_live();
      }
    }

    for (int m = 0; m < 1440; ++m, ++minute_index) {
      const TimePoint t = day_start + minutes{m};

      for (std::size_t i = 0; i < evs.size(); ++i) {
        auto& ev = evs[i];
        if (today[i].departure != t) continue;
        if (ev.in_session) settle(ev, t);
        const auto event = ev.agent.depart(t, d);
        log(t, fmt::format("depart ev={} soc={:.4f}", ev.agent.spec().id,
                           ev.agent.soc_fraction()));
        if (event) {
          result.dissatisfaction.push_back(*event);
          log(t, fmt::format("dissatisfaction ev={} soc={:.4f}", event->ev_id,
                             event->soc_at_departure));
        }
      }

      for (std::size_t i = 0; i < evs.size(); ++i) {
        auto& ev = evs[i];
        if (today[i].arrival != t) continue;
        const int id = ev.agent.spec().id;
        ev.agent.set_today(today[i]);
        ev.agent.drive();
        const double need = ev.agent.energy_needed();
        TimePoint departure = end;
        bool truncated = true;
        if (d + 1 < config.days) {
          departure = sample_driving_day(config.behavior, config.seed, id, d + 1,
                                         day_start + kMinutesPerDay)
                          .departure;
          truncated = false;
        }
        ev.agent.plug_in(departure);
        ChargingSchedule plan = build_rtp_schedule(
            t, departure, need, ev.agent.spec().max_power_kw, prices);

        SessionRecord& s = ev.session;
        s = SessionRecord{};
        s.ev_id = id;
        s.household = ev.household;
        s.day_index = d;
        s.plug_in = t;
        s.departure = departure;
        s.truncated = truncated;
        s.required_kwh = need;
        s.original_cost_dkk = plan.cost(prices);
        ev.in_session = true;
        log(t, fmt::format("plug_in ev={} soc={:.4f} need_kwh={:.3f} "
                           "departure={} plan={}",
                           id, ev.agent.soc_fraction(), need,
                           format_timestamp(departure),
                           charging_runs(plan, config.utc_offset)));

        if (aggregated) {
          FlexOffer offer{id, t, departure, ev.agent.spec().max_power_kw, need,
                          std::move(plan)};
          const auto shift = aggregator.add_flex_offer(std::move(offer), t);
          refresh_live();
          note_shift(t, shift, id);
        } else {
          ev.schedule = std::move(plan);
          ev.live = &ev.schedule;
        }
      }

      const std::size_t hour = minute_index / 60;
      const double base = baseload_h[hour];
      const double base_share = households > 0 ? base / households : 0.0;
      double ev_total = 0.0;
      int charging = 0;
      double* peaks = result.household_daily_peak_kw.data() +
                      static_cast<std::size_t>(d) * static_cast<std::size_t>(households);
      for (int h = 0; h < households; ++h) peaks[h] = std::max(peaks[h], base_share);
      for (auto& ev : evs) {
        if (!ev.in_session) continue;
        const double p = ev.live->power_at(t);
        if (p <= 0.0) continue;
        const double kwh = p / 60.0;
        ev.agent.apply_charging(kwh);
        SessionRecord& s = ev.session;
        s.delivered_kwh += kwh;
        s.cost_dkk += kwh * price_h[hour];
        s.spot_cost_dkk += kwh * spot_h[hour];
        s.tariff_dkk += kwh * result.hourly_tariff_dkk[hour];
        s.emissions_kg += kwh * intensity_h[hour];
        ev_total += p;
        ++charging;
        peaks[ev.household] = std::max(peaks[ev.household], base_share + p);
      }
      result.baseload_kw[minute_index] = base;
      result.ev_kw[minute_index] = ev_total;
      result.aggregate_kw[minute_index] = base + ev_total;
      result.charging_count[minute_index] = static_cast<std::uint16_t>(charging);
      result.stats.max_concurrent_charging =
          std::max(result.stats.max_concurrent_charging, charging);
    }
  }

  for (auto& ev : evs) {
    if (ev.in_session) settle(ev, end);
  }
  for (const auto& s : result.sessions) {
    if (s.rescheduled) ++result.stats.rescheduled_sessions;
  }
  return result;
}

RunComparison compare_runs(const SimulationResult& baseline,
                           const SimulationResult& other) {
  if (baseline.start != other.start || baseline.days != other.days) {
    throw ContractError(fmt::format(
        "runs cover different spans ({} + {} d vs {} + {} d)",
        format_timestamp(baseline.start), baseline.days,
        format_timestamp(other.start), other.days));
  }
  if (baseline.num_households != other.num_households ||
      baseline.num_evs != other.num_evs) {
    throw ContractError("runs simulate different fleets");
  }
  RunComparison cmp;
  cmp.baseline = build_kpi_report(baseline);
  cmp.other = build_kpi_report(other);
  cmp.difference = kpi_difference(cmp.baseline, cmp.other);
  return cmp;
}

}  // namespace gridflex
