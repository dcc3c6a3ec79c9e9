#include <gtest/gtest.h>

#include <cmath>

#include "gridflex/error.hpp"
#include "gridflex/kpi.hpp"
#include "gridflex/rng.hpp"

namespace gridflex {
namespace {

TEST(LoadFactor, FlatLoadIsOne) {
  const std::vector<double> load(24 * 60, 100.0);
  const std::vector<double> hourly(24, 100.0);
  EXPECT_EQ(load_factor(hourly, load, 24.0), 1.0);
}

TEST(LoadFactor, SingleBusyHour) {
  std::vector<double> load(4 * 60, 0.0);
  std::fill(load.begin(), load.begin() + 60, 100.0);
  EXPECT_DOUBLE_EQ(load_factor(std::vector<double>{100.0, 0.0, 0.0, 0.0}, load, 4.0), 0.25);
}

TEST(LoadFactor, Errors) {
  const std::vector<double> zero(60, 0.0);
  EXPECT_THROW(load_factor(std::vector<double>{0.0}, zero, 1.0), ContractError);
  EXPECT_THROW(load_factor(std::vector<double>{1.0}, std::vector<double>(60, 1.0), 0.5),
               ContractError);
}

TEST(CoincidenceFactor, SynchronizedPeaksGiveOne) {
  std::vector<std::vector<double>> ind{{1, 5, 2}, {0, 3, 1}, {2, 7, 2}};
  std::vector<double> agg(3, 0.0);
  for (const auto& p : ind) {
    for (std::size_t t = 0; t < 3; ++t) agg[t] += p[t];
  }
  EXPECT_EQ(coincidence_factor(agg, ind), 1.0);
}

TEST(CoincidenceFactor, DisjointPeaksHalve) {
  std::vector<std::vector<double>> ind{{10, 0}, {0, 10}};
  EXPECT_DOUBLE_EQ(coincidence_factor(std::vector<double>{10, 10}, ind), 0.5);
  EXPECT_THROW(coincidence_factor_from_peaks(5.0, std::vector<double>{0.0, 0.0}), ContractError);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(KpiFormulas, MatchDirectEvaluationOnRandomProfiles) {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const int n_hours = 1 + static_cast<int>(rng.below(48));
    const int consumers = 1 + static_cast<int>(rng.below(8));
    const auto n = static_cast<std::size_t>(n_hours * 60);
    std::vector<std::vector<double>> ind(static_cast<std::size_t>(consumers),
                                         std::vector<double>(n));
    std::vector<double> agg(n, 0.0);
    for (auto& p : ind) {
      for (std::size_t t = 0; t < n; ++t) {
        p[t] = rng.uniform() < 0.3 ? rng.uniform(0.0, 17.3) : 0.0;
        agg[t] += p[t];
      }
      p[rng.below(n)] += 0.5;
    }
    for (std::size_t t = 0; t < n; ++t) {
      agg[t] = 0.0;
      for (const auto& p : ind) agg[t] += p[t];
    }
    std::vector<double> hourly(static_cast<std::size_t>(n_hours), 0.0);
    for (std::size_t t = 0; t < n; ++t) hourly[t / 60] += agg[t] / 60.0;

    // Direct evaluation, written out longhand.
    double energy = 0.0, peak = 0.0;
    for (const double c : hourly) energy += c;
    for (const double p : agg) peak = p > peak ? p : peak;
    const double lf = energy / (peak * n_hours);
    double peak_sum = 0.0;
    for (const auto& p : ind) {
      double m = 0.0;
      for (const double v : p) m = v > m ? v : m;
      peak_sum += m;
    }
    const double cf = peak / peak_sum;

    EXPECT_LE(rel(load_factor(hourly, agg, n_hours), lf), 1e-12) << trial;
    EXPECT_LE(rel(coincidence_factor(agg, ind), cf), 1e-12) << trial;

    std::vector<DissatisfactionEvent> events(rng.below(10));
    EXPECT_EQ(dissatisfaction_total(events), static_cast<long>(events.size()));
  }
}

TEST(Dissatisfaction, Counts) {
  EXPECT_EQ(dissatisfaction_total({}), 0);
  const std::vector<DissatisfactionEvent> e{{1, 0, 0.9}, {1, 1, 0.8}, {2, 0, 0.5}};
  EXPECT_EQ(dissatisfaction_total(e), 3);
}

TEST(Overload, Bands) {
  EXPECT_EQ(classify_overload(850.0 / 400.0), OverloadBand::critical);
  EXPECT_EQ(classify_overload(1.5), OverloadBand::normal_cyclic);
  EXPECT_EQ(classify_overload(1.5000001), OverloadBand::long_time_emergency);
  EXPECT_EQ(classify_overload(1.8), OverloadBand::long_time_emergency);
  EXPECT_EQ(classify_overload(2.0), OverloadBand::short_time_emergency);
  EXPECT_THROW(classify_overload(1.0), ContractError);
  EXPECT_STREQ(to_string(OverloadBand::critical), "critical");
}

TEST(Overload, Stats) {
  EXPECT_EQ(overload_stats(std::vector<double>(60, 400.0), 400.0).overload_minutes, 0);
  std::vector<double> load(120, 300.0);
  load[3] = 850.0;
  for (int m = 10; m < 40; ++m) load[static_cast<std::size_t>(m)] = 500.0;
  const auto s = overload_stats(load, 400.0);
  EXPECT_EQ(s.overload_minutes, 31);
  EXPECT_DOUBLE_EQ(s.overload_hours, 31.0 / 60.0);
  EXPECT_EQ(s.band_minutes[static_cast<std::size_t>(OverloadBand::critical)], 1);
  EXPECT_EQ(s.band_minutes[static_cast<std::size_t>(OverloadBand::normal_cyclic)], 30);
  EXPECT_EQ(s.max_peak_kw, 850.0);
}

TEST(Averages, ConsumerMeanNotEnergyWeighted) {
  const std::vector<SessionTotals> one{{1, 10.0, 5.0, 0.0, 0.0, 2.0}};
  EXPECT_DOUBLE_EQ(avg_charging_cost(one), 0.5);
  EXPECT_DOUBLE_EQ(avg_emissions(one), 0.2);

  const std::vector<SessionTotals> two{{1, 10.0, 4.0, 0, 0, 0}, {2, 30.0, 18.0, 0, 0, 0}};
  EXPECT_DOUBLE_EQ(avg_charging_cost(two), 0.5);

  // One consumer: 5 kWh at 0.1 and 5 kWh at 0.3 kg/kWh over two sessions.
  const std::vector<SessionTotals> split{{1, 5.0, 0, 0, 0, 0.5}, {1, 5.0, 0, 0, 0, 1.5}};
  EXPECT_DOUBLE_EQ(avg_emissions(split), 0.2);

  const std::vector<SessionTotals> none{{1, 0.0, 0, 0, 0, 0}};
  EXPECT_THROW(avg_charging_cost(none), ContractError);
}

TEST(Revenue, SumsTariffOfChargedEnergy) {
  const std::vector<SessionTotals> s{{1, 100.0, 0, 0, 100.0 * 0.8131, 0}};
  EXPECT_NEAR(dso_tariff_revenue(s), 81.31, 1e-12);
  EXPECT_EQ(dso_tariff_revenue({}), 0.0);
}

TEST(Payback, YearsFromCompensation) {
  EXPECT_NEAR(*payback_years(115800.0, 6020.0), 19.24, 0.01);
  EXPECT_NEAR(*payback_years(679800.0, 6020.0), 112.92, 0.01);
  EXPECT_EQ(*payback_years(100.0, 100.0), 1.0);
  EXPECT_FALSE(payback_years(100.0, 0.0).has_value());
  EXPECT_THROW(payback_years(-1.0, 10.0), ContractError);
}

TEST(PercentDifference, Cases) {
  EXPECT_DOUBLE_EQ(*percent_difference(0.089, 0.178), 100.0);
  EXPECT_DOUBLE_EQ(*percent_difference(587.0, 0.0), -100.0);
  EXPECT_EQ(*percent_difference(0.0, 0.0), 0.0);
  EXPECT_FALSE(percent_difference(0.0, 1.0).has_value());

  KpiReport a, b;
  a.load_factor = 0.1;
  b.load_factor = 0.25;
  a.overload_hours = 100.0;
  const auto d = kpi_difference(a, b);
  EXPECT_NEAR(*d.load_factor, 150.0, 1e-12);
  EXPECT_EQ(*d.overload_hours, -100.0);
  EXPECT_EQ(*d.dissatisfaction_count, 0.0);
}

}  // namespace
}  // namespace gridflex
