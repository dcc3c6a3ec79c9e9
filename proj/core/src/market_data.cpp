#include "gridflex/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/format.h>

#include "gridflex/csv.hpp"
#include "gridflex/error.hpp"

namespace gridflex {

template <class Tag>
HourlySeries<Tag>::HourlySeries(TimePoint start, std::vector<double> values)
    : start_(start), values_(std::move(values)) {
  if (values_.empty()) {
    throw DataError(std::string(Tag::kName) + " series is empty");
  }
  if (floor_hour(start_) != start_) {
    throw DataError(std::string(Tag::kName) +
                    " series does not start on an hour boundary");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError(fmt::format("{} series: non-finite value at hour {}",
                                  Tag::kName, i));
    }
    if (!Tag::kAllowNegative && values_[i] < 0.0) {
      throw DataError(fmt::format("{} series: negative value {} at hour {}",
                                  Tag::kName, values_[i], i));
    }
  }
}

template <class Tag>
double HourlySeries<Tag>::at(TimePoint t) const {
  if (!covers(t)) {
    throw DataError(fmt::format("{} series does not cover {} (covers {} .. {})",
                                Tag::kName, format_timestamp(t),
                                format_timestamp(start_),
                                format_timestamp(end())));
  }
  const auto index = std::chrono::duration_cast<hours>(t - start_).count();
  return values_[static_cast<std::size_t>(index)];
}

template class HourlySeries<SpotPriceTag>;
template class HourlySeries<BaseloadTag>;
template class HourlySeries<CarbonIntensityTag>;
template class HourlySeries<TotalPriceTag>;

template <class Series>
Series load_hourly_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  const std::string file = path.filename().string();
  if (lines.empty()) {
    throw DataError(file + ": empty file (expected header 'timestamp,value')");
  }
  std::vector<double> values;
  values.reserve(lines.size());
  TimePoint start{};
  TimePoint previous{};
  // Row numbers in messages are 1-based file lines; the header is row 1.
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = csv::trim(lines[i]);
    if (line.empty()) continue;
    const std::string context = fmt::format("{}: row {}", file, i + 1);
    const auto fields = csv::split(line);
    if (fields.size() != 2) {
      throw DataError(context + ": expected 2 fields, found " +
                      std::to_string(fields.size()));
    }
    TimePoint t;
    try {
      t = parse_timestamp(fields[0]);
    } catch (const DataError& e) {
      throw DataError(context + ": " + e.what());
    }
    const double value = csv::parse_double(fields[1], context);
    if (values.empty()) {
      start = t;
    } else if (t <= previous) {
      throw DataError(context + ": timestamp " + format_timestamp(t) +
                      " is not after " + format_timestamp(previous));
    } else if (t - previous != hours{1}) {
      throw DataError(fmt::format(
          "{}: gap in series between {} and {} ({} minutes missing)", context,
          format_timestamp(previous), format_timestamp(t),
          (t - previous - hours{1}).count()));
    }
    previous = t;
    values.push_back(value);
  }
  if (values.empty()) {
    throw DataError(file + ": no data rows");
  }
  try {
    return Series(start, std::move(values));
  } catch (const DataError& e) {
    throw DataError(file + ": " + e.what());
  }
}

template PriceSeries load_hourly_csv<PriceSeries>(const std::filesystem::path&);
template BaseloadProfile load_hourly_csv<BaseloadProfile>(
    const std::filesystem::path&);
template CarbonIntensitySeries load_hourly_csv<CarbonIntensitySeries>(
    const std::filesystem::path&);

AnySeries load_price_csv(const std::filesystem::path& path, SeriesKind kind) {
  switch (kind) {
    case SeriesKind::spot:
      return load_hourly_csv<PriceSeries>(path);
    case SeriesKind::baseload:
      return load_hourly_csv<BaseloadProfile>(path);
    case SeriesKind::intensity:
      return load_hourly_csv<CarbonIntensitySeries>(path);
  }
  throw ContractError("unknown series kind");
}

template <class Series>
void write_hourly_csv(std::ostream& out, const Series& series) {
  out << "timestamp,value\n";
  TimePoint t = series.start();
  for (const double v : series.values()) {
    out << format_timestamp(t) << ',' << fmt::format("{}", v) << '\n';
    t += hours{1};
  }
}

template <class Series>
void write_hourly_csv(const std::filesystem::path& path, const Series& series) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_hourly_csv(out, series);
}

template void write_hourly_csv(std::ostream&, const PriceSeries&);
template void write_hourly_csv(std::ostream&, const BaseloadProfile&);
template void write_hourly_csv(std::ostream&, const CarbonIntensitySeries&);
template void write_hourly_csv(const std::filesystem::path&,
                               const PriceSeries&);
template void write_hourly_csv(const std::filesystem::path&,
                               const BaseloadProfile&);
template void write_hourly_csv(const std::filesystem::path&,
                               const CarbonIntensitySeries&);

// ---------------------------------------------------------------------------

Season SeasonRule::season_of(std::chrono::year_month_day date) const {
  const std::chrono::month_day md{date.month(), date.day()};
  const bool wraps = winter_end < winter_start;
  const bool in_winter = wraps ? (md >= winter_start || md <= winter_end)
                               : (md >= winter_start && md <= winter_end);
  return in_winter ? Season::winter : Season::summer;
}

namespace {

std::array<double, 24> expand_bands(const std::vector<TariffBand>& bands,
                                    const char* season) {
  std::array<double, 24> by_hour{};
  std::array<bool, 24> seen{};
  for (const auto& band : bands) {
    if (band.start_hour < 0 || band.end_hour > 24 ||
        band.start_hour >= band.end_hour) {
      throw ConfigError(fmt::format("{} tariff band [{}, {}) is not a valid "
                                    "hour range",
                                    season, band.start_hour, band.end_hour));
    }
    if (!(band.rate_ore >= 0.0)) {
      throw ConfigError(
          fmt::format("{} tariff rate {} is negative", season, band.rate_ore));
    }
    for (int h = band.start_hour; h < band.end_hour; ++h) {
      if (seen[h]) {
        throw ConfigError(
            fmt::format("{} tariff bands overlap at hour {}", season, h));
      }
      seen[h] = true;
      by_hour[h] = band.rate_ore;
    }
  }
  for (int h = 0; h < 24; ++h) {
    if (!seen[h]) {
      throw ConfigError(
          fmt::format("{} tariff bands leave hour {} uncovered", season, h));
    }
  }
  return by_hour;
}

}  // namespace

TariffSchedule::TariffSchedule(std::vector<TariffBand> winter,
                               std::vector<TariffBand> summer, SeasonRule rule,
                               hours utc_offset)
    : winter_(std::move(winter)),
      summer_(std::move(summer)),
      rule_(rule),
      utc_offset_(utc_offset) {
  if (!rule_.winter_start.ok() || !rule_.winter_end.ok()) {
    throw ConfigError("invalid winter season boundary date");
  }
  winter_by_hour_ = expand_bands(winter_, "winter");
  summer_by_hour_ = expand_bands(summer_, "summer");
}

TariffSchedule TariffSchedule::trefor_c_customer(SeasonRule rule,
                                                 hours utc_offset) {
  return TariffSchedule({{0, 6, 9.04}, {6, 17, 27.10}, {17, 21, 81.31},
                         {21, 24, 27.10}},
                        {{0, 6, 9.04}, {6, 17, 13.55}, {17, 21, 35.24},
                         {21, 24, 13.55}},
                        rule, utc_offset);
}

Season TariffSchedule::season_at(TimePoint t) const {
  return rule_.season_of(local_date(t, utc_offset_));
}

double TariffSchedule::rate_ore(TimePoint t) const {
  const int hour = local_hour(t, utc_offset_);
  return season_at(t) == Season::winter ? winter_by_hour_[hour]
                                        : summer_by_hour_[hour];
}

double tariff_at(const TariffSchedule& schedule, TimePoint t) {
  return schedule.rate_dkk(t);
}

double total_price(const PriceSeries& spot, const TariffSchedule& schedule,
                   TimePoint t) {
  return spot.at(t) + schedule.rate_dkk(t);
}

TotalPriceSeries total_price_series(const PriceSeries& spot,
                                    const TariffSchedule& schedule) {
  std::vector<double> totals(spot.size());
  TimePoint t = spot.start();
  for (std::size_t i = 0; i < spot.size(); ++i, t += hours{1}) {
    totals[i] = spot[i] + schedule.rate_dkk(t);
  }
  return TotalPriceSeries(spot.start(), std::move(totals));
}

std::vector<double> baseload_forecast(const BaseloadProfile& profile,
                                      TimePoint day_start) {
  const TimePoint day_end = day_start + hours{24};
  if (!profile.covers(day_start, day_end)) {
    throw DataError(fmt::format(
        "baseload profile ({} .. {}) does not cover the day starting {}",
        format_timestamp(profile.start()), format_timestamp(profile.end()),
        format_timestamp(day_start)));
  }
  std::vector<double> forecast(24);
  for (int h = 0; h < 24; ++h) {
    forecast[h] = profile.at(day_start + hours{h});
  }
  return forecast;
}

std::vector<double> baseload_forecast(const BaseloadProfile& profile,
                                      std::chrono::year_month_day day,
                                      hours utc_offset) {
  return baseload_forecast(profile, local_midnight(day, utc_offset));
}

SeriesStats summarize(std::span<const double> values) {
  SeriesStats stats;
  stats.rows = values.size();
  if (values.empty()) return stats;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  stats.min = *lo;
  stats.max = *hi;
  stats.mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
  return stats;
}

}  // namespace gridflex
