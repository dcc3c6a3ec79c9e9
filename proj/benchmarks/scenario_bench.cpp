#include <benchmark/benchmark.h>

#include "gridflex/config.hpp"
#include "gridflex/engine.hpp"
#include "gridflex/kpi.hpp"

namespace gf = gridflex;

namespace {

// One simulated year on the shipped data; the budget is 60 s.
void BM_DefaultYear(benchmark::State& state, const char* config_name) {
  const auto config = gf::load_scenario_config(std::filesystem::path(GRIDFLEX_DATA_DIR) /
                                               config_name);
  const auto data = gf::load_scenario_data(config);
  for (auto _ : state) {
    const auto result = gf::run_scenario(config, data);
    const auto kpi = gf::build_kpi_report(result);
    benchmark::DoNotOptimize(kpi);
    state.counters["overload_h"] = kpi.overload_hours;
  }
}
BENCHMARK_CAPTURE(BM_DefaultYear, baseline, "baseline.cfg")
    ->Unit(benchmark::kSecond)
    ->Iterations(1);
BENCHMARK_CAPTURE(BM_DefaultYear, aggregated, "aggregated.cfg")
    ->Unit(benchmark::kSecond)
    ->Iterations(1);

}  // namespace
