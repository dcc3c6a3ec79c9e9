// Writes the default synthetic dataset: one year of hourly spot prices,
// transformer baseload and carbon intensity, plus a 126-EV fleet.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridflex/error.hpp"
#include "gridflex/fleet.hpp"
#include "gridflex/market_data.hpp"
#include "gridflex/rng.hpp"
#include "gridflex/time.hpp"

namespace gf = gridflex;

namespace {

// Night spot premium over the cheapest hour, DKK/kWh, local hours 0..5.
constexpr double kNightShape[6] = {0.012, 0.007, 0.003, 0.0, 0.002, 0.006};

// Summer afternoons on sunny days, local hours 12..16.
constexpr int kSolarFirstHour = 12;
constexpr int kSolarLastHour = 16;
constexpr double kSolarDiscount[5] = {0.002, 0.004, 0.006, 0.008, 0.010};
constexpr double kSummerDayTariffPremium = 0.1355 - 0.0904;

double day_spot_shape(int hour) {
  if (hour < 6) return kNightShape[hour];
  const double morning = 0.14 * std::exp(-0.5 * std::pow((hour - 8) / 1.5, 2));
  const double evening = 0.26 * std::exp(-0.5 * std::pow((hour - 18.5) / 1.8, 2));
  return 0.03 + morning + evening;
}

double household_kw(int hour) {
  const double morning = 0.30 * std::exp(-0.5 * std::pow((hour - 7.5) / 1.2, 2));
  const double evening = 0.85 * std::exp(-0.5 * std::pow((hour - 18.5) / 1.7, 2));
  return 0.25 + morning + evening + (hour >= 8 && hour < 17 ? 0.12 : 0.0);
}

struct Options {
  std::filesystem::path out = "data";
  std::uint64_t seed = 7;
  int year = 2025;
  int households = 126;
  int utc_offset = 1;
};

void generate(const Options& opt) {
  using namespace std::chrono;
  const auto first = year_month_day{year{opt.year}, January, day{1}};
  const auto next = year_month_day{year{opt.year + 1}, January, day{1}};
  const hours offset{opt.utc_offset};
  const gf::TimePoint start = gf::local_midnight(first, offset);
  const gf::TimePoint end = gf::local_midnight(next, offset);
  const auto n = static_cast<std::size_t>(duration_cast<hours>(end - start).count());

  gf::Rng rng(opt.seed);
  const std::size_t days = n / 24 + 1;
  std::vector<double> day_level(days + 1), day_clean(days + 1);
  std::vector<bool> sunny(days + 1);
  for (std::size_t d = 0; d <= days; ++d) {
    day_level[d] = std::clamp(rng.normal(0.0, 0.07), -0.18, 0.18);
    day_clean[d] = std::clamp(rng.normal(0.0, 0.04), -0.08, 0.08);
    sunny[d] = d >= 95 && d < 268 && rng.uniform() < 0.85;
  }
  // Price levels drift from one day to the next through the evening, so the
  // night is never undercut by the late evening of the day before.
  auto level_at = [&](std::size_t d, int hour) {
    if (hour < 18) return day_level[d];
    const double w = (hour - 17) / 7.0;
    return (1.0 - w) * day_level[d] + w * day_level[d + 1];
  };
  auto seasonal = [](std::size_t d) {
    return std::cos(2.0 * std::numbers::pi * (static_cast<double>(d) + 10.0) / 365.0);
  };
  auto night_floor = [&](std::size_t d) {
    return 0.40 + 0.12 * seasonal(d) + day_level[d];
  };
  auto level_floor = [&](std::size_t d, int hour) {
    return 0.40 + 0.12 * seasonal(d) + level_at(d, hour);
  };
  std::vector<double> spot(n), base(n), intensity(n);
  for (std::size_t h = 0; h < n; ++h) {
    const gf::TimePoint t = start + hours{static_cast<long>(h)};
    const int hour = gf::local_hour(t, offset);
    const std::size_t d = h / 24;
    const double winter = seasonal(d);
    spot[h] = level_floor(d, hour) + day_spot_shape(hour) + rng.uniform(0.0, 0.0008);
    if (sunny[d] && hour >= kSolarFirstHour && hour <= kSolarLastHour) {
      // Solar afternoons undercut the following night by a small margin once
      // the summer day tariff is added.
      spot[h] = night_floor(d + 1) - kSummerDayTariffPremium -
                kSolarDiscount[hour - kSolarFirstHour] + rng.uniform(0.0, 0.0008);
    }
    base[h] = opt.households * household_kw(hour) * (1.0 + 0.22 * winter) *
              (1.0 + rng.uniform(-0.04, 0.04));
    const double solar =
        hour >= 9 && hour <= 16 ? 0.05 * (1.0 - winter) * std::sin((hour - 8) / 9.0 * std::numbers::pi)
                                : 0.0;
    intensity[h] = std::max(0.03, 0.20 + 0.05 * winter + day_clean[d] - solar +
                                      0.03 * (day_spot_shape(hour) - 0.1) +
                                      rng.uniform(-0.01, 0.01));
  }
  std::filesystem::create_directories(opt.out);
  gf::write_hourly_csv(opt.out / "spot.csv", gf::PriceSeries(start, spot));
  gf::write_hourly_csv(opt.out / "baseload.csv", gf::BaseloadProfile(start, base));
  gf::write_hourly_csv(opt.out / "intensity.csv",
                       gf::CarbonIntensitySeries(start, intensity));

  // 51 × 7.4 kW, 60 × 11 kW, 15 × 17.3 kW: 1296.9 kW in total.
  struct Class {
    int count;
    double power;
    double batteries[3];
  };
  const Class classes[] = {{51, 7.4, {40.0, 50.0, 58.0}},
                           {60, 11.0, {58.0, 64.0, 77.0}},
                           {15, 17.3, {77.0, 82.0, 100.0}}};
  std::vector<gf::EvSpec> fleet;
  for (const auto& c : classes) {
    for (int i = 0; i < c.count; ++i) {
      fleet.push_back({0, c.batteries[rng.below(3)], c.power, 0.2});
    }
  }
  for (std::size_t i = fleet.size(); i > 1; --i) {
    std::swap(fleet[i - 1], fleet[rng.below(i)]);
  }
  for (std::size_t i = 0; i < fleet.size(); ++i) fleet[i].id = static_cast<int>(i + 1);
  gf::write_fleet_csv(opt.out / "fleet.csv", fleet);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic gridflex dataset"};
  Options opt;
  app.add_option("--out", opt.out, "Output directory")->capture_default_str();
  app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  app.add_option("--year", opt.year, "Calendar year (local time)")->capture_default_str();
  app.add_option("--households", opt.households, "Households behind the transformer")
      ->capture_default_str();
  app.add_option("--utc-offset", opt.utc_offset, "Local UTC offset, hours")
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    generate(opt);
  } catch (const gf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << fmt::format("wrote {}\n", opt.out.string());
  return 0;
}
