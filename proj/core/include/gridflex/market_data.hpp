#pragma once

// Exogenous hourly time series (spot prices, household baseload, carbon
// intensity) and the time-of-use distribution tariff.

#include <array>
#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gridflex/time.hpp"

namespace gridflex {

struct SpotPriceTag {
  static constexpr const char* kName = "spot";
  static constexpr bool kAllowNegative = true;
};
struct BaseloadTag {
  static constexpr const char* kName = "baseload";
  static constexpr bool kAllowNegative = false;
};
struct CarbonIntensityTag {
  static constexpr const char* kName = "intensity";
  static constexpr bool kAllowNegative = false;
};
struct TotalPriceTag {
  static constexpr const char* kName = "total price";
  static constexpr bool kAllowNegative = true;
};

// A contiguous series with exactly one value per hour starting at an hour
// boundary. Values are finite; the tag decides whether negatives are legal.
// Immutable once built.
template <class Tag>
class HourlySeries {
 public:
  HourlySeries(TimePoint start, std::vector<double> values);

  TimePoint start() const { return start_; }
  // One past the last covered instant.
  TimePoint end() const {
    return start_ + hours{static_cast<long>(values_.size())};
  }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  bool covers(TimePoint t) const { return t >= start_ && t < end(); }
  bool covers(TimePoint from, TimePoint to) const {
    return from >= start_ && to <= end();
  }

  // Value of the hour containing `t`; DataError outside coverage.
  double at(TimePoint t) const;

  double operator[](std::size_t hour_index) const {
    return values_[hour_index];
  }

 private:
  TimePoint start_;
  std::vector<double> values_;
};

using PriceSeries = HourlySeries<SpotPriceTag>;             // DKK/kWh
using BaseloadProfile = HourlySeries<BaseloadTag>;          // kW
using CarbonIntensitySeries = HourlySeries<CarbonIntensityTag>;  // kg/kWh
using TotalPriceSeries = HourlySeries<TotalPriceTag>;       // DKK/kWh

enum class SeriesKind { spot, baseload, intensity };

using AnySeries =
    std::variant<PriceSeries, BaseloadProfile, CarbonIntensitySeries>;

// Reads a `timestamp,value` CSV with a header line. Rows must be strictly
// increasing and exactly one hour apart; any gap is an error.
template <class Series>
Series load_hourly_csv(const std::filesystem::path& path);

AnySeries load_price_csv(const std::filesystem::path& path, SeriesKind kind);

// Values are written with round-trip precision.
template <class Series>
void write_hourly_csv(std::ostream& out, const Series& series);
template <class Series>
void write_hourly_csv(const std::filesystem::path& path, const Series& series);

// ---------------------------------------------------------------------------
// Time-of-use tariff

enum class Season { winter, summer };

// [start_hour, end_hour) in local time, rate in øre/kWh.
struct TariffBand {
  int start_hour;
  int end_hour;
  double rate_ore;
};

// Winter runs from `winter_start` through `winter_end` inclusive and wraps
// over the new year when winter_start > winter_end.
struct SeasonRule {
  std::chrono::month_day winter_start{std::chrono::October / 1};
  std::chrono::month_day winter_end{std::chrono::March / 31};

  Season season_of(std::chrono::year_month_day date) const;
};

class TariffSchedule {
 public:
  TariffSchedule(std::vector<TariffBand> winter, std::vector<TariffBand> summer,
                 SeasonRule rule = {}, hours utc_offset = hours{1});

  // Trefor Tariff Model 3.0 for C-customers, January 2025.
  static TariffSchedule trefor_c_customer(SeasonRule rule = {},
                                          hours utc_offset = hours{1});

  Season season_at(TimePoint t) const;
  double rate_ore(TimePoint t) const;
  // øre → DKK happens here.
  double rate_dkk(TimePoint t) const { return rate_ore(t) / 100.0; }

  hours utc_offset() const { return utc_offset_; }
  const SeasonRule& season_rule() const { return rule_; }
  std::span<const TariffBand> bands(Season season) const {
    return season == Season::winter ? std::span<const TariffBand>(winter_)
                                    : std::span<const TariffBand>(summer_);
  }

 private:
  std::vector<TariffBand> winter_;
  std::vector<TariffBand> summer_;
  std::array<double, 24> winter_by_hour_{};
  std::array<double, 24> summer_by_hour_{};
  SeasonRule rule_;
  hours utc_offset_;
};

// DKK/kWh.
double tariff_at(const TariffSchedule& schedule, TimePoint t);

// Spot price of the hour containing `t` plus the tariff, DKK/kWh.
double total_price(const PriceSeries& spot, const TariffSchedule& schedule,
                   TimePoint t);

// Precomputes total_price for every hour covered by `spot`.
TotalPriceSeries total_price_series(const PriceSeries& spot,
                                    const TariffSchedule& schedule);

// Perfect day-ahead forecast: the recorded values of that local day.
std::vector<double> baseload_forecast(const BaseloadProfile& profile,
                                      std::chrono::year_month_day day,
                                      hours utc_offset = hours{1});

// Same, for the 24 hours starting at `day_start`.
std::vector<double> baseload_forecast(const BaseloadProfile& profile,
                                      TimePoint day_start);

// Summary used by `validate`.
struct SeriesStats {
  std::size_t rows = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};
SeriesStats summarize(std::span<const double> values);

}  // namespace gridflex
