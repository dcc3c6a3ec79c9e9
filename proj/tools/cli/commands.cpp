#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridflex/config.hpp"
#include "gridflex/engine.hpp"
#include "gridflex/error.hpp"
#include "gridflex/kpi.hpp"
#include "gridflex/report.hpp"

namespace gridflex::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

fs::path output_root() {
  if (const char* env = std::getenv("GRIDFLEX_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return "gridflex-out";
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out = "gridflex";
  for (const auto& a : args) out += " " + a;
  return out;
}

ScenarioConfig read_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ConfigError(fmt::format("{}: config file not found", path.string()));
  }
  return load_scenario_config(path);
}

struct RunOptions {
  fs::path config;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
};

int cmd_run(const RunOptions& opt, const std::vector<std::string>& args,
            std::ostream& out, std::ostream& err) {
  ScenarioConfig config = read_config(opt.config);
  if (opt.seed) config.seed = *opt.seed;
  config.validate();
  const fs::path dir = opt.out ? *opt.out : output_root() / to_string(config.strategy);

  const ScenarioData data = load_scenario_data(config);
  check_coverage(config, data);
  for (const auto& w : data.warnings) err << "warning: " << w << '\n';

  RunManifest manifest = make_manifest(config, opt.config, dir, data.warnings,
                                       join_args(args));
  write_manifest_file(dir, manifest);

  const SimulationResult result = run_scenario(config, data);
  const KpiReport report = build_kpi_report(result, config.revenue_includes_baseload);
  write_run_outputs(dir, result, report, manifest);

  out << fmt::format("strategy {} | {} days from {} | {} EVs | seed {}\n",
                     to_string(config.strategy), config.days,
                     format_timestamp(config.start), result.num_evs, config.seed);
  out << format_kpi_table(report);
  out << fmt::format("outputs written to {}\n", dir.string());
  return kExitOk;
}

struct CompareOptions {
  fs::path baseline;
  fs::path aggregated;
  std::optional<fs::path> out;
};

int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
  const RunManifest a = read_manifest(opt.baseline / kManifestName);
  const RunManifest b = read_manifest(opt.aggregated / kManifestName);
  if (a.start != b.start || a.days != b.days) {
    throw DataError(fmt::format(
        "runs cover different spans: {} + {} d in {} vs {} + {} d in {}", a.start,
        a.days, opt.baseline.string(), b.start, b.days, opt.aggregated.string()));
  }
  if (a.inputs.size() != b.inputs.size() ||
      !std::equal(a.inputs.begin(), a.inputs.end(), b.inputs.begin(),
                  [](const ManifestEntry& x, const ManifestEntry& y) {
                    return x.value == y.value;
                  })) {
    err << "warning: the two runs used different input data\n";
  }
  const KpiReport ka = read_kpi_csv(opt.baseline / "kpi.csv");
  const KpiReport kb = read_kpi_csv(opt.aggregated / "kpi.csv");
  const KpiDifference d = kpi_difference(ka, kb);
  out << format_comparison(ka, kb, d);

  const fs::path dir = opt.out ? *opt.out : opt.aggregated;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path path = dir / "compare.csv";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(fmt::format("{}: cannot open for writing", path.string()));
  write_comparison_csv(file, ka, kb, d);
  if (!file) throw DataError(fmt::format("{}: write failed", path.string()));
  out << fmt::format("comparison written to {}\n", path.string());
  return kExitOk;
}

struct PaybackOptions {
  double annual_compensation = 0.0;
  std::vector<double> upgrade_costs{115800.0, 240000.0, 589000.0, 679800.0};
};

int cmd_payback(const PaybackOptions& opt, std::ostream& out) {
  if (!(opt.annual_compensation > 0.0)) {
    throw UsageError(fmt::format("--annual-compensation must be positive, got {}",
                                 opt.annual_compensation));
  }
  out << fmt::format("{:>18}{:>18}\n", "upgrade_cost_dkk", "payback_years");
  for (const double cost : opt.upgrade_costs) {
    if (cost < 0.0) throw UsageError(fmt::format("--upgrade-cost must be >= 0, got {}", cost));
    const auto years = payback_years(cost, opt.annual_compensation);
    out << fmt::format("{:>18.2f}{:>18.2f}\n", cost, *years);
  }
  return kExitOk;
}

template <class Series>
void print_stats(std::ostream& out, const char* name, const Series& s) {
  const auto st = summarize(s.values());
  out << fmt::format("{:<10}{:>8}{:>14.4f}{:>14.4f}{:>14.4f}  {} .. {}\n", name, st.rows,
                     st.min, st.max, st.mean, format_timestamp(s.start()),
                     format_timestamp(s.end()));
}

int cmd_validate(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  const ScenarioConfig config = read_config(config_path);
  config.validate();
  const ScenarioData data = load_scenario_data(config);
  for (const auto& w : data.warnings) err << "warning: " << w << '\n';
  out << fmt::format("{:<10}{:>8}{:>14}{:>14}{:>14}  coverage\n", "series", "rows", "min",
                     "max", "mean");
  print_stats(out, "spot", data.spot);
  print_stats(out, "baseload", data.baseload);
  print_stats(out, "intensity", data.intensity);
  std::vector<double> power;
  for (const auto& ev : data.fleet) power.push_back(ev.max_power_kw);
  if (!power.empty()) {
    const auto st = summarize(power);
    out << fmt::format("fleet: {} EVs, charge power sum {:.1f} kW, min {:.1f}, "
                       "max {:.1f}, mean {:.2f}\n",
                       st.rows, st.mean * static_cast<double>(st.rows), st.min, st.max,
                       st.mean);
  }
  check_coverage(config, data);
  out << fmt::format("ok: data covers {} + {} days\n", format_timestamp(config.start),
                     config.days);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Simulate EV charging behind one distribution transformer"};
  app.name("gridflex");
  app.require_subcommand(1);
  app.set_version_flag("--version", GRIDFLEX_VERSION_STRING);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run one scenario and write its outputs");
  run->add_option("--config", run_opt.config, "Scenario config file")->required();
  run->add_option("--out", run_opt.out,
                  "Output directory (default: $GRIDFLEX_OUT/<strategy>, "
                  "else gridflex-out/<strategy>)");
  run->add_option("--seed", run_opt.seed, "Override the config seed");

  CompareOptions cmp_opt;
  auto* compare = app.add_subcommand("compare", "Compare two run directories");
  compare->add_option("--baseline", cmp_opt.baseline, "Baseline run directory")
      ->required();
  compare->add_option("--aggregated", cmp_opt.aggregated, "Aggregated run directory")
      ->required();
  compare->add_option("--out", cmp_opt.out,
                      "Directory for compare.csv (default: the aggregated run)");

  PaybackOptions pay_opt;
  auto* payback = app.add_subcommand("payback", "Payback years of grid upgrades");
  payback->add_option("--annual-compensation", pay_opt.annual_compensation,
                      "Aggregator compensation paid per year, DKK")
      ->required();
  payback->add_option("--upgrade-cost", pay_opt.upgrade_costs,
                      "Upgrade cost in DKK; repeat for several options")
      ->capture_default_str();

  fs::path validate_config;
  auto* validate = app.add_subcommand("validate", "Check that a scenario is runnable");
  validate->add_option("--config", validate_config, "Scenario config file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opt, args, out, err);
    if (*compare) return cmd_compare(cmp_opt, out, err);
    if (*payback) return cmd_payback(pay_opt, out);
    if (*validate) return cmd_validate(validate_config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace gridflex::cli
