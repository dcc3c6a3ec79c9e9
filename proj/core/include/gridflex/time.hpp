#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridflex {

// All instants are stored in UTC at minute resolution.
using TimePoint = std::chrono::sys_time<std::chrono::minutes>;
using std::chrono::hours;
using std::chrono::minutes;

inline constexpr minutes kMinutesPerHour{60};
inline constexpr minutes kMinutesPerDay{1440};

// Accepts `YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM|-HH:MM]` (a space may replace the
// `T`; a missing zone designator means UTC). Seconds must be zero.
TimePoint parse_timestamp(std::string_view text);

// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(TimePoint t);

// `YYYY-MM-DD` of the local calendar date of `t`.
std::string format_local_date(TimePoint t, hours utc_offset);

inline TimePoint floor_hour(TimePoint t) {
  return std::chrono::floor<hours>(t);
}

// Start of the local calendar day `day`, expressed in UTC.
TimePoint local_midnight(std::chrono::year_month_day day, hours utc_offset);

std::chrono::year_month_day local_date(TimePoint t, hours utc_offset);

// Hour of day [0, 24) in local time.
int local_hour(TimePoint t, hours utc_offset);

inline std::int64_t minutes_between(TimePoint from, TimePoint to) {
  return (to - from).count();
}

}  // namespace gridflex
