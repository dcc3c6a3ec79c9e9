#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "commands.hpp"
#include "gridflex/fleet.hpp"
#include "gridflex/market_data.hpp"
#include "test_util.hpp"

namespace gridflex {
namespace {

using testing::TempDir;
using testing::ts;

struct Cli {
  int code = 0;
  std::string out;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Cli r;
  r.code = cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Three days of flat data with a cheap night and eight EVs on a 40 kW
// transformer.
class CliFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    const TimePoint start = ts("2025-01-01T00:00+01:00");
    std::vector<double> spot, base, intensity;
    for (int h = 0; h < 72; ++h) {
      const int local = h % 24;
      spot.push_back(local < 6 ? 0.2 + 0.01 * local : 0.6);
      base.push_back(local >= 17 && local < 21 ? 12.0 : 5.0);
      intensity.push_back(0.15);
    }
    write_hourly_csv(dir / "spot.csv", PriceSeries(start, spot));
    write_hourly_csv(dir / "baseload.csv", BaseloadProfile(start, base));
    write_hourly_csv(dir / "intensity.csv", CarbonIntensitySeries(start, intensity));
    intensity.resize(48);
    write_hourly_csv(dir / "short_intensity.csv", CarbonIntensitySeries(start, intensity));
    std::vector<EvSpec> fleet;
    for (int i = 1; i <= 8; ++i) fleet.push_back({i, 60.0, i % 2 ? 11.0 : 7.4, 0.2});
    write_fleet_csv(dir / "fleet.csv", fleet);
    dir.write("fleet22.csv", "id,battery_kwh,max_power_kw,consumption_kwh_per_km\n"
                             "1,60,22,0.2\n2,60,11,0.2\n");
  }

  std::string config(const std::string& strategy, const std::string& extra = "") {
    const std::string name = strategy + std::to_string(counter++) + ".cfg";
    return dir
        .write(name, "schema_version = 1\nstrategy = " + strategy +
                         "\ndays = 3\nseed = 5\nnum_households = 8\n"
                         "transformer_capacity_kw = 40\n" + extra +
                         (extra.find("spot_csv") == std::string::npos ? "spot_csv = spot.csv\n" : "") +
                         "baseload_csv = baseload.csv\n" +
                         (extra.find("intensity_csv") == std::string::npos
                              ? "intensity_csv = intensity.csv\n"
                              : "") +
                         (extra.find("fleet_csv") == std::string::npos ? "fleet_csv = fleet.csv\n"
                                                                       : ""))
        .string();
  }

  TempDir dir;
  int counter = 0;
};

TEST(Cli, HelpAndUsage) {
  const auto help = cli({"--help"});
  EXPECT_EQ(help.code, 0);
  for (const char* cmd : {"run", "compare", "payback", "validate"}) {
    EXPECT_NE(help.out.find(cmd), std::string::npos) << cmd;
  }
  EXPECT_EQ(cli({}).code, 1);
  EXPECT_EQ(cli({"run", "--bogus"}).code, 1);
  EXPECT_EQ(cli({"run"}).code, 1);
  EXPECT_EQ(cli({"frobnicate"}).code, 1);
  EXPECT_EQ(cli({"--version"}).code, 0);
}

TEST(Cli, PaybackTable) {
  const auto r = cli({"payback", "--annual-compensation", "6020"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("upgrade_cost_dkk"), std::string::npos);
  EXPECT_NE(r.out.find("19.24"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("112.92"), std::string::npos) << r.out;

  const auto one = cli({"payback", "--annual-compensation", "100", "--upgrade-cost", "250"});
  EXPECT_NE(one.out.find("2.50"), std::string::npos) << one.out;
}

TEST(Cli, PaybackNeedsPositiveCompensation) {
  const auto r = cli({"payback", "--annual-compensation", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("annual-compensation"), std::string::npos);
  EXPECT_EQ(cli({"payback", "--annual-compensation", "10", "--upgrade-cost", "-5"}).code, 1);
}

TEST_F(CliFixture, MissingConfigIsAUsageError) {
  EXPECT_EQ(cli({"run", "--config", (dir / "nope.cfg").string()}).code, 1);
  EXPECT_EQ(cli({"run", "--config", dir.write("bad.cfg", "schema_version = 1\n").string()}).code, 1);
}

TEST_F(CliFixture, MissingSpotFileIsADataError) {
  const auto r = cli({"run", "--config", config("aggregated", "spot_csv = gone.csv\n"), "--out",
                      (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("gone.csv"), std::string::npos) << r.err;
}

TEST_F(CliFixture, ShortSeriesIsADataError) {
  const auto cfg = config("aggregated", "intensity_csv = short_intensity.csv\n");
  const auto r = cli({"validate", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("intensity"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("24 h missing"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"run", "--config", cfg, "--out", (dir / "o").string()}).code, 2);
}

TEST_F(CliFixture, ValidateReportsSeriesAndWarnings) {
  const auto ok = cli({"validate", "--config", config("aggregated")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("spot"), std::string::npos);
  EXPECT_NE(ok.out.find("fleet: 8 EVs"), std::string::npos) << ok.out;
  EXPECT_NE(ok.out.find("ok:"), std::string::npos);

  const auto clamp = cli({"validate", "--config",
                          config("aggregated", "fleet_csv = fleet22.csv\nev_adoption = 0.25\n")});
  EXPECT_EQ(clamp.code, 0) << clamp.err;
  EXPECT_NE(clamp.err.find("clamped to 17.3"), std::string::npos) << clamp.err;
}

TEST_F(CliFixture, RunWritesEveryOutput) {
  const auto out = dir / "agg";
  const auto r = cli({"run", "--config", config("aggregated"), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"load.csv", "sessions.csv", "compensation.csv", "kpi.csv", "events.log",
                        "manifest.txt"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  const auto load = testing::read_file(out / "load.csv");
  EXPECT_EQ(load.rfind("timestamp,kw\n", 0), 0u);
  EXPECT_EQ(std::count(load.begin(), load.end(), '\n'), 3 * 1440 + 1);
  EXPECT_EQ(testing::read_file(out / "compensation.csv")
                .rfind("ev_id,date,original_cost_dkk,shifted_cost_dkk,compensation_dkk\n", 0),
            0u);
  EXPECT_NE(r.out.find("overload hours"), std::string::npos);
}

TEST_F(CliFixture, OutputRootComesFromTheEnvironment) {
  ::setenv("GRIDFLEX_OUT", (dir / "root").c_str(), 1);
  const auto r = cli({"run", "--config", config("baseline-rtp")});
  ::unsetenv("GRIDFLEX_OUT");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "root" / "baseline-rtp" / "kpi.csv"));
}

TEST_F(CliFixture, SeedOverrideIsDeterministic) {
  const auto cfg = config("aggregated");
  ASSERT_EQ(cli({"run", "--config", cfg, "--out", (dir / "a").string(), "--seed", "11"}).code, 0);
  ASSERT_EQ(cli({"run", "--config", cfg, "--out", (dir / "b").string(), "--seed", "11"}).code, 0);
  ASSERT_EQ(cli({"run", "--config", cfg, "--out", (dir / "c").string(), "--seed", "12"}).code, 0);
  EXPECT_EQ(testing::read_file(dir / "a" / "events.log"),
            testing::read_file(dir / "b" / "events.log"));
  EXPECT_EQ(testing::read_file(dir / "a" / "kpi.csv"), testing::read_file(dir / "b" / "kpi.csv"));
  EXPECT_NE(testing::read_file(dir / "a" / "events.log"),
            testing::read_file(dir / "c" / "events.log"));
  EXPECT_NE(testing::read_file(dir / "a" / "manifest.txt").find("seed = 11"), std::string::npos);
}

TEST_F(CliFixture, CompareRuns) {
  const auto base = dir / "base", agg = dir / "agg";
  ASSERT_EQ(cli({"run", "--config", config("baseline-rtp"), "--out", base.string()}).code, 0);
  ASSERT_EQ(cli({"run", "--config", config("aggregated"), "--out", agg.string()}).code, 0);

  const auto same = cli({"compare", "--baseline", base.string(), "--aggregated", base.string(),
                         "--out", (dir / "same").string()});
  ASSERT_EQ(same.code, 0) << same.err;
  const auto csv = testing::read_file(dir / "same" / "compare.csv");
  EXPECT_NE(csv.find("percent_difference,0.0%,0.0%,0.0%"), std::string::npos) << csv;

  const auto diff = cli({"compare", "--baseline", base.string(), "--aggregated", agg.string()});
  ASSERT_EQ(diff.code, 0) << diff.err;
  EXPECT_TRUE(std::filesystem::exists(agg / "compare.csv"));
  EXPECT_NE(diff.out.find("load_factor"), std::string::npos);

}

TEST_F(CliFixture, CompareRejectsDifferentSpans) {
  const auto a = dir / "a", b = dir / "b";
  ASSERT_EQ(cli({"run", "--config", config("baseline-rtp"), "--out", a.string()}).code, 0);
  std::string cfg_text = testing::read_file(config("aggregated"));
  cfg_text.replace(cfg_text.find("days = 3"), 8, "days = 2");
  ASSERT_EQ(cli({"run", "--config", dir.write("two.cfg", cfg_text).string(), "--out", b.string()})
                .code,
            0);
  const auto r = cli({"compare", "--baseline", a.string(), "--aggregated", b.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("different spans"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"compare", "--baseline", (dir / "none").string(), "--aggregated", b.string()}).code,
            2);
}

}  // namespace
}  // namespace gridflex
