#include "gridflex/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "gridflex/csv.hpp"
#include "gridflex/error.hpp"

namespace gridflex {

const char* to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::baseline_rtp:
      return "baseline-rtp";
    case Strategy::aggregated:
      return "aggregated";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "baseline-rtp" || text == "baseline") return Strategy::baseline_rtp;
  if (text == "aggregated") return Strategy::aggregated;
  throw ConfigError("unknown strategy '" + std::string(text) +
                    "' (expected baseline-rtp or aggregated)");
}

TariffSchedule ScenarioConfig::tariff() const {
  return TariffSchedule(winter_bands, summer_bands, season, utc_offset);
}

void ScenarioConfig::validate() const {
  if (schema_version != kSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})",
                                  schema_version, kSchemaVersion));
  }
  if (days < 1) throw ConfigError("days must be >= 1");
  if (num_households < 0) throw ConfigError("num_households must be >= 0");
  if (!(ev_adoption >= 0.0 && ev_adoption <= 1.0)) {
    throw ConfigError("ev_adoption must lie in [0, 1]");
  }
  if (!(transformer_capacity_kw > 0.0)) {
    throw ConfigError("transformer_capacity_kw must be positive");
  }
  if (tick_minutes != 1) throw ConfigError("tick_minutes must be 1");
  if (!(soc_target > 0.0 && soc_target <= 1.0)) {
    throw ConfigError("soc_target must lie in (0, 1]");
  }
  if (std::chrono::floor<hours>(start) != start) {
    throw ConfigError("start must be on an hour boundary");
  }
  if (utc_offset < hours{-12} || utc_offset > hours{14}) {
    throw ConfigError("utc_offset_hours out of range");
  }
  if (local_hour(start, utc_offset) != 0) {
    throw ConfigError("start must be local midnight for the given utc offset");
  }
  for (const auto* p : {&spot_csv, &baseload_csv, &intensity_csv, &fleet_csv}) {
    if (p->empty()) {
      throw ConfigError(
          "spot_csv, baseload_csv, intensity_csv and fleet_csv are required");
    }
  }
  tariff();  // validates bands
  behavior.validate();
}

namespace {

// "HH:MM" → minutes after midnight.
double parse_clock(std::string_view text, std::string_view key) {
  text = csv::trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError(fmt::format("{}: expected HH:MM, got '{}'", key, text));
  }
  try {
    const auto h = csv::parse_int(text.substr(0, colon), key);
    const auto m = csv::parse_int(text.substr(colon + 1), key);
    if (h < 0 || h > 23 || m < 0 || m > 59) throw DataError("range");
    return static_cast<double>(h * 60 + m);
  } catch (const DataError&) {
    throw ConfigError(fmt::format("{}: expected HH:MM, got '{}'", key, text));
  }
}

std::string format_clock(double minutes_after_midnight) {
  const auto total = static_cast<long>(minutes_after_midnight + 0.5);
  return fmt::format("{:02}:{:02}", total / 60, total % 60);
}

std::chrono::month_day parse_month_day(std::string_view text,
                                       std::string_view key) {
  text = csv::trim(text);
  const auto dash = text.find('-');
  try {
    if (dash == std::string_view::npos) throw DataError("format");
    const auto m = csv::parse_int(text.substr(0, dash), key);
    const auto d = csv::parse_int(text.substr(dash + 1), key);
    const std::chrono::month_day md{
        std::chrono::month{static_cast<unsigned>(m)},
        std::chrono::day{static_cast<unsigned>(d)}};
    if (!md.ok()) throw DataError("range");
    return md;
  } catch (const DataError&) {
    throw ConfigError(fmt::format("{}: expected MM-DD, got '{}'", key, text));
  }
}

double parse_number(std::string_view text, std::string_view key) {
  try {
    return csv::parse_double(text, key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

long long parse_integer(std::string_view text, std::string_view key) {
  try {
    return csv::parse_int(text, key);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

bool parse_bool(std::string_view text, std::string_view key) {
  text = csv::trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(fmt::format("{}: expected true or false", key));
}

// "0-6,6-17,17-21,21-24" together with "9.04,27.10,81.31,27.10".
std::vector<TariffBand> parse_bands(std::string_view hours_text,
                                    std::string_view rates_text,
                                    std::string_view key) {
  const auto ranges = csv::split(hours_text);
  const auto rates = csv::split(rates_text);
  if (ranges.size() != rates.size()) {
    throw ConfigError(fmt::format(
        "{}: {} rates given for {} tariff bands", key, rates.size(),
        ranges.size()));
  }
  std::vector<TariffBand> bands;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto dash = ranges[i].find('-');
    if (dash == std::string_view::npos) {
      throw ConfigError(
          fmt::format("tariff_band_hours: expected H-H, got '{}'", ranges[i]));
    }
    bands.push_back(TariffBand{
        static_cast<int>(parse_integer(ranges[i].substr(0, dash), key)),
        static_cast<int>(parse_integer(ranges[i].substr(dash + 1), key)),
        parse_number(rates[i], key)});
  }
  return bands;
}

DistanceTable parse_distance_table(std::string_view text) {
  std::vector<std::pair<double, double>> entries;
  for (const auto item : csv::split(text)) {
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(fmt::format(
          "distance_table: expected km:probability, got '{}'", item));
    }
    entries.emplace_back(parse_number(item.substr(0, colon), "distance_table"),
                         parse_number(item.substr(colon + 1), "distance_table"));
  }
  return DistanceTable(std::move(entries));
}

std::string format_bands_hours(const std::vector<TariffBand>& bands) {
  std::string out;
  for (const auto& b : bands) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}-{}", b.start_hour, b.end_hour);
  }
  return out;
}

std::string format_bands_rates(const std::vector<TariffBand>& bands) {
  std::string out;
  for (const auto& b : bands) {
    if (!out.empty()) out += ',';
    out += fmt::format("{}", b.rate_ore);
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view text,
                                     const std::filesystem::path& base_dir) {
  std::map<std::string, std::string, std::less<>> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(
          fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
    }
    const std::string key{csv::trim(line.substr(0, eq))};
    const std::string value{csv::trim(line.substr(eq + 1))};
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (!entries.emplace(key, value).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
  }

  ScenarioConfig config;
  auto take = [&](std::string_view key) -> std::optional<std::string> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    std::string value = it->second;
    entries.erase(it);
    return value;
  };
  auto path = [&](const std::string& v) {
    std::filesystem::path p{v};
    return p.is_absolute() ? p : base_dir / p;
  };

  const auto version = take("schema_version");
  if (!version) throw ConfigError("missing required key 'schema_version'");
  config.schema_version =
      static_cast<int>(parse_integer(*version, "schema_version"));
  if (config.schema_version != kSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})",
                                  config.schema_version, kSchemaVersion));
  }

  if (auto v = take("strategy")) config.strategy = parse_strategy(*v);
  if (auto v = take("start")) {
    try {
      config.start = parse_timestamp(*v);
    } catch (const DataError& e) {
      throw ConfigError(std::string("start: ") + e.what());
    }
  }
  if (auto v = take("days")) config.days = static_cast<int>(parse_integer(*v, "days"));
  if (auto v = take("seed")) {
    config.seed = static_cast<std::uint64_t>(parse_integer(*v, "seed"));
  }
  if (auto v = take("num_households")) {
    config.num_households = static_cast<int>(parse_integer(*v, "num_households"));
  }
  if (auto v = take("ev_adoption")) config.ev_adoption = parse_number(*v, "ev_adoption");
  if (auto v = take("transformer_capacity_kw")) {
    config.transformer_capacity_kw = parse_number(*v, "transformer_capacity_kw");
  }
  if (auto v = take("tick_minutes")) {
    config.tick_minutes = static_cast<int>(parse_integer(*v, "tick_minutes"));
  }
  if (auto v = take("soc_target")) config.soc_target = parse_number(*v, "soc_target");
  if (auto v = take("revenue_includes_baseload")) {
    config.revenue_includes_baseload = parse_bool(*v, "revenue_includes_baseload");
  }
  if (auto v = take("spot_csv")) config.spot_csv = path(*v);
  if (auto v = take("baseload_csv")) config.baseload_csv = path(*v);
  if (auto v = take("intensity_csv")) config.intensity_csv = path(*v);
  if (auto v = take("fleet_csv")) config.fleet_csv = path(*v);
  if (auto v = take("utc_offset_hours")) {
    config.utc_offset = hours{parse_integer(*v, "utc_offset_hours")};
  }
  if (auto v = take("winter_start")) {
    config.season.winter_start = parse_month_day(*v, "winter_start");
  }
  if (auto v = take("winter_end")) {
    config.season.winter_end = parse_month_day(*v, "winter_end");
  }
  const auto band_hours = take("tariff_band_hours");
  const auto winter = take("tariff_winter_ore");
  const auto summer = take("tariff_summer_ore");
  if (band_hours || winter || summer) {
    if (!band_hours || !winter || !summer) {
      throw ConfigError(
          "tariff_band_hours, tariff_winter_ore and tariff_summer_ore must be "
          "given together");
    }
    config.winter_bands = parse_bands(*band_hours, *winter, "tariff_winter_ore");
    config.summer_bands = parse_bands(*band_hours, *summer, "tariff_summer_ore");
  }

  auto& b = config.behavior;
  if (auto v = take("departure_mean")) b.departure.mean = parse_clock(*v, "departure_mean");
  if (auto v = take("departure_sd_min")) b.departure.sd = parse_number(*v, "departure_sd_min");
  if (auto v = take("departure_earliest")) b.departure.lo = parse_clock(*v, "departure_earliest");
  if (auto v = take("departure_latest")) b.departure.hi = parse_clock(*v, "departure_latest");
  if (auto v = take("arrival_mean")) b.arrival.mean = parse_clock(*v, "arrival_mean");
  if (auto v = take("arrival_sd_min")) b.arrival.sd = parse_number(*v, "arrival_sd_min");
  if (auto v = take("arrival_earliest")) b.arrival.lo = parse_clock(*v, "arrival_earliest");
  if (auto v = take("arrival_latest")) b.arrival.hi = parse_clock(*v, "arrival_latest");
  if (auto v = take("distance_table")) b.distance = parse_distance_table(*v);

  if (!entries.empty()) {
    throw ConfigError("unknown config key '" + entries.begin()->first + "'");
  }
  config.validate();
  return config;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_config(buffer.str(), path.parent_path());
}

std::string format_scenario_config(const ScenarioConfig& c) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  line("schema_version", std::to_string(c.schema_version));
  line("strategy", to_string(c.strategy));
  line("start", format_timestamp(c.start));
  line("days", std::to_string(c.days));
  line("seed", std::to_string(c.seed));
  line("num_households", std::to_string(c.num_households));
  line("ev_adoption", fmt::format("{}", c.ev_adoption));
  line("transformer_capacity_kw", fmt::format("{}", c.transformer_capacity_kw));
  line("tick_minutes", std::to_string(c.tick_minutes));
  line("soc_target", fmt::format("{}", c.soc_target));
  line("revenue_includes_baseload", c.revenue_includes_baseload ? "true" : "false");
  line("spot_csv", c.spot_csv.string());
  line("baseload_csv", c.baseload_csv.string());
  line("intensity_csv", c.intensity_csv.string());
  line("fleet_csv", c.fleet_csv.string());
  line("utc_offset_hours", std::to_string(c.utc_offset.count()));
  line("winter_start", fmt::format("{:02}-{:02}",
                                   static_cast<unsigned>(c.season.winter_start.month()),
                                   static_cast<unsigned>(c.season.winter_start.day())));
  line("winter_end", fmt::format("{:02}-{:02}",
                                 static_cast<unsigned>(c.season.winter_end.month()),
                                 static_cast<unsigned>(c.season.winter_end.day())));
  line("tariff_band_hours", format_bands_hours(c.winter_bands));
  line("tariff_winter_ore", format_bands_rates(c.winter_bands));
  line("tariff_summer_ore", format_bands_rates(c.summer_bands));
  const auto& b = c.behavior;
  line("departure_mean", format_clock(b.departure.mean));
  line("departure_sd_min", fmt::format("{}", b.departure.sd));
  line("departure_earliest", format_clock(b.departure.lo));
  line("departure_latest", format_clock(b.departure.hi));
  line("arrival_mean", format_clock(b.arrival.mean));
  line("arrival_sd_min", fmt::format("{}", b.arrival.sd));
  line("arrival_earliest", format_clock(b.arrival.lo));
  line("arrival_latest", format_clock(b.arrival.hi));
  std::string table;
  for (const auto& [km, p] : b.distance.entries()) {
    if (!table.empty()) table += ',';
    table += fmt::format("{}:{}", km, p);
  }
  line("distance_table", table);
  return out;
}

}  // namespace gridflex
