// End-to-end acceptance checks on the shipped default dataset. Prints one
// PASS/FAIL line per criterion and exits non-zero when any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "gridflex/config.hpp"
#include "gridflex/engine.hpp"
#include "gridflex/kpi.hpp"
#include "gridflex/market_data.hpp"
#include "gridflex/rng.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

namespace gf = gridflex;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::cout << fmt::format("[{}] criterion {} {:<28} {}\n", ok ? "PASS" : "FAIL", id, name,
                           detail)
            << std::flush;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Run {
  gf::SimulationResult result;
  gf::KpiReport kpi;
  double seconds = 0.0;
};

Run simulate(const gf::ScenarioConfig& config, const gf::ScenarioData& data) {
  const auto t0 = Clock::now();
  Run run;
  run.result = gf::run_scenario(config, data);
  run.kpi = gf::build_kpi_report(run.result, config.revenue_includes_baseload);
  run.seconds = seconds_since(t0);
  return run;
}

double parse_payback(const std::string& table, double cost) {
  std::istringstream in(table);
  std::string header;
  std::getline(in, header);
  double c = 0.0, years = 0.0;
  while (in >> c >> years) {
    if (std::abs(c - cost) < 1e-6) return years;
  }
  return std::nan("");
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

int main() {
  const auto data_dir = gf::testing::data_dir();
  const auto agg_cfg = gf::load_scenario_config(data_dir / "aggregated.cfg");
  const auto base_cfg = gf::load_scenario_config(data_dir / "baseline.cfg");
  const auto data = gf::load_scenario_data(agg_cfg);
  gf::check_coverage(agg_cfg, data);

  const Run agg = simulate(agg_cfg, data);
  const Run base = simulate(base_cfg, data);

  // 1. Zero overload with the aggregator, within the runtime budget.
  {
    const auto stats = gf::overload_stats(agg.result.aggregate_kw, agg.result.capacity_kw);
    report(1, "zero overload", stats.overload_minutes == 0 && agg.seconds <= 60.0,
           fmt::format("overload_minutes={} max_peak={:.4f} kW runtime={:.1f} s (<= 60)",
                       stats.overload_minutes, stats.max_peak_kw, agg.seconds));
  }

  // 2. The baseline overloads the transformer.
  {
    const double cap = base.result.capacity_kw;
    report(2, "baseline overload", base.kpi.overload_hours >= 100.0 &&
                                       base.kpi.max_peak_kw >= 2.0 * cap,
           fmt::format("overload_hours={:.2f} (>= 100) max_peak={:.1f} kW (>= {:.0f})",
                       base.kpi.overload_hours, base.kpi.max_peak_kw, 2.0 * cap));
  }

  // 3. Direction of the KPI changes.
  {
    const double cost_change =
        (agg.kpi.avg_charging_cost - base.kpi.avg_charging_cost) / base.kpi.avg_charging_cost *
        100.0;
    const bool ok = agg.kpi.load_factor > 2.0 * base.kpi.load_factor &&
                    agg.kpi.daily_avg_coincidence_factor <
                        0.6 * base.kpi.daily_avg_coincidence_factor &&
                    cost_change >= 0.0 && cost_change <= 5.0 &&
                    agg.kpi.dissatisfaction_count == 0 && base.kpi.dissatisfaction_count == 0;
    report(3, "directional KPI shifts", ok,
           fmt::format("LF {:.4f}->{:.4f} CF {:.4f}->{:.4f} cost {:+.2f}% "
                       "dissatisfaction {}/{}",
                       base.kpi.load_factor, agg.kpi.load_factor,
                       base.kpi.daily_avg_coincidence_factor,
                       agg.kpi.daily_avg_coincidence_factor, cost_change,
                       base.kpi.dissatisfaction_count, agg.kpi.dissatisfaction_count));
  }

  // 4. Rescheduled users are never worse off after compensation.
  {
    long rescheduled = 0, violations = 0;
    double worst = -1e300;
    for (const auto& s : agg.result.sessions) {
      if (!s.rescheduled) continue;
      ++rescheduled;
      const double slack = (s.cost_dkk - s.compensation_dkk) - s.original_cost_dkk;
      worst = std::max(worst, slack);
      if (slack > 0.005) ++violations;
    }
    const double total = agg.kpi.compensation_total;
    const double share = total / agg.kpi.total_charging_cost;
    report(4, "compensation neutrality",
           rescheduled > 0 && violations == 0 && total > 0.0 && share < 0.02,
           fmt::format("rescheduled={} violations={} worst_slack={:.2e} DKK "
                       "compensation={:.2f} DKK ({:.3f}% of {:.0f} DKK)",
                       rescheduled, violations, worst, total, share * 100.0,
                       agg.kpi.total_charging_cost));
  }

  // 5. Feasible random instances are always solved in full.
  {
    const auto t0 = Clock::now();
    gf::Rng rng(20250101);
    int feasible = 0, missed = 0;
    for (int i = 0; i < 1000; ++i) {
      const auto inst = gf::testing::random_instance(rng, gf::parse_timestamp("2025-01-01T00:00Z"));
      if (!gf::testing::SlotOracle(inst).feasible()) continue;
      ++feasible;
      const auto out = gf::testing::run_heuristic(inst);
      if (!out.full_energy || !out.within_capacity) ++missed;
    }
    const double secs = seconds_since(t0);
    report(5, "scheduler oracle", missed == 0 && secs <= 30.0,
           fmt::format("feasible={}/1000 missed={} runtime={:.2f} s (<= 30)", feasible, missed,
                       secs));
  }

  // 6. KPI formulas against direct evaluation.
  {
    gf::Rng rng(6);
    double worst = 0.0;
    long count_errors = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n_hours = 1 + static_cast<int>(rng.below(24));
      const int consumers = 1 + static_cast<int>(rng.below(6));
      const auto n = static_cast<std::size_t>(n_hours * 60);
      std::vector<std::vector<double>> ind(static_cast<std::size_t>(consumers),
                                           std::vector<double>(n));
      std::vector<double> total(n, 0.0), hourly(static_cast<std::size_t>(n_hours), 0.0);
      for (auto& p : ind) {
        for (auto& v : p) v = rng.uniform(0.0, 20.0);
      }
      for (std::size_t t = 0; t < n; ++t) {
        for (const auto& p : ind) total[t] += p[t];
        hourly[t / 60] += total[t] / 60.0;
      }
      double energy = 0.0, peak = 0.0, peak_sum = 0.0;
      for (const double c : hourly) energy += c;
      for (const double p : total) peak = std::max(peak, p);
      for (const auto& p : ind) {
        double m = 0.0;
        for (const double v : p) m = std::max(m, v);
        peak_sum += m;
      }
      worst = std::max(worst, rel(gf::load_factor(hourly, total, n_hours),
                                  energy / (peak * n_hours)));
      worst = std::max(worst, rel(gf::coincidence_factor(total, ind), peak / peak_sum));
      std::vector<gf::DissatisfactionEvent> events(rng.below(20));
      if (gf::dissatisfaction_total(events) != static_cast<long>(events.size())) ++count_errors;
    }
    const std::vector<double> flat(24 * 60, 100.0), flat_hourly(24, 100.0);
    const double lf_flat = gf::load_factor(flat_hourly, flat, 24.0);
    const std::vector<std::vector<double>> sync{{1.0, 4.0, 2.0}, {0.5, 3.0, 1.0}};
    const double cf_sync = gf::coincidence_factor(std::vector<double>{1.5, 7.0, 3.0}, sync);
    report(6, "KPI formula fidelity",
           worst <= 1e-12 && count_errors == 0 && lf_flat == 1.0 && cf_sync == 1.0,
           fmt::format("max_rel_error={:.2e} (<= 1e-12) LF_flat={} CF_sync={}", worst, lf_flat,
                       cf_sync));
  }

  // 7. Payback arithmetic through the command line.
  {
    std::ostringstream out, err;
    const int code = gf::cli::run_cli({"payback", "--annual-compensation", "6020",
                                       "--upgrade-cost", "115800", "--upgrade-cost", "679800"},
                                      out, err);
    const double short_years = parse_payback(out.str(), 115800.0);
    const double long_years = parse_payback(out.str(), 679800.0);
    report(7, "payback arithmetic",
           code == 0 && std::abs(short_years - 19.24) <= 0.01 &&
               std::abs(long_years - 112.92) <= 0.01,
           fmt::format("115800/6020={:.2f} y 679800/6020={:.2f} y", short_years, long_years));
  }

  // 8. Identical runs give identical files.
  {
    gf::testing::TempDir dir;
    const std::string cfg = (data_dir / "aggregated.cfg").string();
    std::ostringstream sink, err;
    const int a = gf::cli::run_cli({"run", "--config", cfg, "--out", (dir / "a").string()}, sink,
                                   err);
    const int b = gf::cli::run_cli({"run", "--config", cfg, "--out", (dir / "b").string()}, sink,
                                   err);
    bool same = a == 0 && b == 0;
    std::string detail;
    for (const char* f : {"kpi.csv", "load.csv"}) {
      const auto x = gf::testing::read_file(dir / "a" / f);
      const auto y = gf::testing::read_file(dir / "b" / f);
      same = same && !x.empty() && x == y;
      detail += fmt::format("{}: {} bytes {} ", f, x.size(), x == y ? "identical" : "DIFFER");
    }
    if (a != 0 || b != 0) detail += err.str();
    report(8, "determinism", same, detail);
  }

  // 9. Tariff table cells.
  {
    const auto sched = agg_cfg.tariff();
    struct Cell {
      const char* t;
      double ore;
    };
    const Cell cells[] = {
        {"2025-01-15T03:00:00+01:00", 9.04},  {"2025-01-15T09:00:00+01:00", 27.10},
        {"2025-01-15T18:30:00+01:00", 81.31}, {"2025-01-15T22:00:00+01:00", 27.10},
        {"2025-07-15T03:00:00+01:00", 9.04},  {"2025-07-15T10:00:00+01:00", 13.55},
        {"2025-07-15T19:00:00+01:00", 35.24}, {"2025-07-15T23:00:00+01:00", 13.55},
    };
    int exact = 0;
    for (const auto& c : cells) {
      const auto t = gf::parse_timestamp(c.t);
      if (sched.rate_ore(t) == c.ore && gf::tariff_at(sched, t) == c.ore / 100.0) ++exact;
    }
    report(9, "tariff table", exact == 8, fmt::format("{}/8 cells exact", exact));
  }

  std::cout << (failures == 0 ? "all acceptance criteria passed\n"
                              : fmt::format("{} criteria failed\n", failures));
  return failures == 0 ? 0 : 1;
}
