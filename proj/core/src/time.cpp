#include "gridflex/time.hpp"

#include <charconv>
#include <cstdio>

#include "gridflex/error.hpp"

namespace gridflex {
namespace {

int parse_int(std::string_view text, std::size_t pos, std::size_t len,
              std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) {
    throw DataError("truncated timestamp '" + std::string(whole) + "'");
  }
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw DataError("malformed timestamp '" + std::string(whole) + "'");
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c,
            std::string_view whole) {
  if (pos >= text.size() || text[pos] != c) {
    throw DataError("malformed timestamp '" + std::string(whole) + "'");
  }
}

}  // namespace

TimePoint parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  const std::string_view whole = text;
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

  const int y = parse_int(text, 0, 4, whole);
  expect(text, 4, '-', whole);
  const int mo = parse_int(text, 5, 2, whole);
  expect(text, 7, '-', whole);
  const int d = parse_int(text, 8, 2, whole);
  if (text.size() < 11 || (text[10] != 'T' && text[10] != ' ')) {
    throw DataError("malformed timestamp '" + std::string(whole) + "'");
  }
  const int hh = parse_int(text, 11, 2, whole);
  expect(text, 13, ':', whole);
  const int mm = parse_int(text, 14, 2, whole);
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    const int ss = parse_int(text, pos + 1, 2, whole);
    if (ss != 0) {
      throw DataError("timestamp '" + std::string(whole) +
                      "' is not aligned to a whole minute");
    }
    pos += 3;
  }
  minutes offset{0};
  if (pos < text.size()) {
    const char zone = text[pos];
    if (zone == 'Z' && pos + 1 == text.size()) {
      // UTC
    } else if ((zone == '+' || zone == '-') && text.size() == pos + 6) {
      const int oh = parse_int(text, pos + 1, 2, whole);
      expect(text, pos + 3, ':', whole);
      const int om = parse_int(text, pos + 4, 2, whole);
      offset = hours{oh} + minutes{om};
      if (zone == '-') offset = -offset;
    } else {
      throw DataError("malformed timestamp '" + std::string(whole) + "'");
    }
  }

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59) {
    throw DataError("invalid date/time in timestamp '" + std::string(whole) +
                    "'");
  }
  return TimePoint{sys_days{ymd}} + hours{hh} + minutes{mm} - offset;
}

std::string format_timestamp(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00Z",
                static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()));
  return buf;
}

std::chrono::year_month_day local_date(TimePoint t, hours utc_offset) {
  return std::chrono::year_month_day{
      std::chrono::floor<std::chrono::days>(t + utc_offset)};
}

std::string format_local_date(TimePoint t, hours utc_offset) {
  const auto ymd = local_date(t, utc_offset);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

TimePoint local_midnight(std::chrono::year_month_day day, hours utc_offset) {
  return TimePoint{std::chrono::sys_days{day}} - utc_offset;
}

int local_hour(TimePoint t, hours utc_offset) {
  const auto local = t + utc_offset;
  const auto since_midnight =
      local - std::chrono::floor<std::chrono::days>(local);
  return static_cast<int>(
      std::chrono::duration_cast<hours>(since_midnight).count());
}

}  // namespace gridflex
