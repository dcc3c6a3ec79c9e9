#include <gtest/gtest.h>

#include "gridflex/config.hpp"
#include "gridflex/error.hpp"
#include "test_util.hpp"

namespace gridflex {
namespace {

using testing::TempDir;
using testing::ts;

const char* kMinimal =
    "schema_version = 1\n"
    "spot_csv = spot.csv\n"
    "baseload_csv = baseload.csv\n"
    "intensity_csv = intensity.csv\n"
    "fleet_csv = fleet.csv\n";

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

TEST(Config, DefaultsAndRelativePaths) {
  const auto c = parse_scenario_config(kMinimal, "/data/set");
  EXPECT_EQ(c.strategy, Strategy::aggregated);
  EXPECT_EQ(c.start, ts("2025-01-01T00:00+01:00"));
  EXPECT_EQ(c.days, 365);
  EXPECT_EQ(c.num_households, 126);
  EXPECT_EQ(c.transformer_capacity_kw, 400.0);
  EXPECT_EQ(c.spot_csv, std::filesystem::path("/data/set/spot.csv"));
  EXPECT_EQ(c.end(), ts("2026-01-01T00:00+01:00"));
  EXPECT_EQ(c.tariff().rate_ore(ts("2025-01-02T18:00+01:00")), 81.31);
}

TEST(Config, ParsesEveryOptionalKey) {
  const auto c = parse_scenario_config(
      with("strategy = baseline-rtp  # comment\n"
           "days = 7\nseed = 9\nnum_households = 10\nev_adoption = 0.5\n"
           "transformer_capacity_kw = 80\nsoc_target = 0.9\n"
           "revenue_includes_baseload = true\nutc_offset_hours = 2\n"
           "start = 2025-03-01T00:00:00+02:00\n"
           "winter_start = 11-01\nwinter_end = 02-28\n"
           "tariff_band_hours = 0-12,12-24\ntariff_winter_ore = 10,20\n"
           "tariff_summer_ore = 5,6\n"
           "departure_mean = 08:00\ndeparture_sd_min = 30\n"
           "departure_earliest = 06:00\ndeparture_latest = 09:30\n"
           "arrival_mean = 17:00\narrival_sd_min = 45\n"
           "arrival_earliest = 14:00\narrival_latest = 20:00\n"
           "distance_table = 10:0.5,30:0.5\n"),
      "/d");
  EXPECT_EQ(c.strategy, Strategy::baseline_rtp);
  EXPECT_EQ(c.days, 7);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.ev_adoption, 0.5);
  EXPECT_TRUE(c.revenue_includes_baseload);
  EXPECT_EQ(c.utc_offset, hours{2});
  EXPECT_EQ(c.winter_bands.size(), 2u);
  EXPECT_EQ(c.summer_bands[1].rate_ore, 6.0);
  EXPECT_EQ(c.behavior.departure.mean, 480.0);
  EXPECT_EQ(c.behavior.arrival.hi, 1200.0);
  EXPECT_DOUBLE_EQ(c.behavior.distance.mean(), 20.0);
}

TEST(Config, FormatRoundTrips) {
  auto c = parse_scenario_config(with("days = 30\nseed = 77\nstrategy = baseline\n"), "/x");
  const auto back = parse_scenario_config(format_scenario_config(c), "/elsewhere");
  EXPECT_EQ(format_scenario_config(back), format_scenario_config(c));
  EXPECT_EQ(back.spot_csv, c.spot_csv);
  EXPECT_EQ(back.strategy, Strategy::baseline_rtp);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_scenario_config("spot_csv = a\n", "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("schema_version = 2\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config("schema_version = 2\n", "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("colour = blue\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("days = 0\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("days = many\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("ev_adoption = 1.5\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("transformer_capacity_kw = 0\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("start = 2025-01-01T05:00Z\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("strategy = greedy\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("tariff_band_hours = 0-24\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("departure_mean = 7h\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("distance_table = 10:0.4\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("no equals sign\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config(with("days = 3\ndays = 4\n"), "/"), ConfigError);
  EXPECT_THROW(parse_scenario_config("schema_version = 1\n", "/"), ConfigError);
}

TEST(Config, LoadsFromFileRelativeToItsDirectory) {
  TempDir dir;
  const auto path = dir.write("s.cfg", kMinimal);
  const auto c = load_scenario_config(path);
  EXPECT_EQ(c.fleet_csv, dir / "fleet.csv");
  EXPECT_THROW(load_scenario_config(dir / "none.cfg"), ConfigError);
}

TEST(Config, ShippedConfigsParse) {
  const auto base = load_scenario_config(testing::data_dir() / "baseline.cfg");
  const auto agg = load_scenario_config(testing::data_dir() / "aggregated.cfg");
  EXPECT_EQ(base.strategy, Strategy::baseline_rtp);
  EXPECT_EQ(agg.strategy, Strategy::aggregated);
  EXPECT_EQ(base.seed, agg.seed);
  EXPECT_EQ(base.days, 365);
}

}  // namespace
}  // namespace gridflex
