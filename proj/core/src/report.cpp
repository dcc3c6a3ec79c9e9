#include "gridflex/report.hpp"

#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "gridflex/csv.hpp"
#include "gridflex/error.hpp"

namespace gridflex {

void write_load_csv(std::ostream& out, const SimulationResult& result) {
  out << "timestamp,kw\n";
  for (std::size_t i = 0; i < result.minutes(); ++i) {
    const TimePoint t = result.start + minutes{static_cast<long>(i)};
    out << fmt::format("{},{:.3f}\n", format_timestamp(t), result.aggregate_kw[i]);
  }
}

void write_sessions_csv(std::ostream& out, const SimulationResult& result) {
  out << "ev_id,household,day,plug_in,departure,truncated,required_kwh,"
         "delivered_kwh,original_cost_dkk,cost_dkk,spot_cost_dkk,tariff_dkk,"
         "emissions_kg,compensation_dkk,rescheduled\n";
  for (const auto& s : result.sessions) {
    out << fmt::format("{},{},{},{},{},{},{:.3f},{:.3f},{:.2f},{:.2f},{:.2f},"
                       "{:.2f},{:.3f},{:.2f},{}\n",
                       s.ev_id, s.household, s.day_index,
                       format_timestamp(s.plug_in), format_timestamp(s.departure),
                       s.truncated ? 1 : 0, s.required_kwh, s.delivered_kwh,
                       s.original_cost_dkk, s.cost_dkk, s.spot_cost_dkk,
                       s.tariff_dkk, s.emissions_kg, s.compensation_dkk,
                       s.rescheduled ? 1 : 0);
  }
}

void write_compensation_csv(std::ostream& out, const SimulationResult& result) {
  out << "ev_id,date,original_cost_dkk,shifted_cost_dkk,compensation_dkk\n";
  for (const auto& c : result.compensation) {
    out << fmt::format("{},{},{:.2f},{:.2f},{:.2f}\n", c.ev_id,
                       format_local_date(c.session_start, result.utc_offset),
                       c.original_cost_dkk, c.shifted_cost_dkk, c.compensation_dkk);
  }
}

void write_event_log(std::ostream& out, const SimulationResult& result) {
  for (const auto& line : result.event_log) out << line << '\n';
}

namespace {

struct KpiField {
  const char* key;
  std::function<double(const KpiReport&)> get;
  std::function<void(KpiReport&, double)> set;
};

template <class T>
KpiField field(const char* key, T KpiReport::*member) {
  return {key, [member](const KpiReport& r) { return static_cast<double>(r.*member); },
          [member](KpiReport& r, double v) { r.*member = static_cast<T>(v); }};
}

KpiField band_field(const char* key, std::size_t band) {
  return {key,
          [band](const KpiReport& r) {
            return static_cast<double>(r.overload_band_minutes[band]);
          },
          [band](KpiReport& r, double v) {
            r.overload_band_minutes[band] = static_cast<long>(v);
          }};
}

const std::vector<KpiField>& kpi_fields() {
  static const std::vector<KpiField> fields{
      field("overload_hours", &KpiReport::overload_hours),
      field("load_factor", &KpiReport::load_factor),
      field("daily_avg_coincidence_factor", &KpiReport::daily_avg_coincidence_factor),
      field("avg_charging_cost_dkk_per_kwh", &KpiReport::avg_charging_cost),
      field("avg_emissions_kg_per_kwh", &KpiReport::avg_emissions),
      field("dso_tariff_revenue_dkk", &KpiReport::dso_tariff_revenue),
      field("dissatisfaction_count", &KpiReport::dissatisfaction_count),
      field("compensation_total_dkk", &KpiReport::compensation_total),
      field("max_peak_kw", &KpiReport::max_peak_kw),
      band_field("overload_minutes_normal_cyclic", 0),
      band_field("overload_minutes_long_time_emergency", 1),
      band_field("overload_minutes_short_time_emergency", 2),
      band_field("overload_minutes_critical", 3),
      field("total_charging_cost_dkk", &KpiReport::total_charging_cost),
      field("total_charged_kwh", &KpiReport::total_charged_kwh),
  };
  return fields;
}

std::string opt_percent(const std::optional<double>& v) {
  return v ? fmt::format("{:+.2f}%", *v) : std::string("n/a");
}

}  // namespace

void write_kpi_csv(std::ostream& out, const KpiReport& report) {
  const auto& fields = kpi_fields();
  for (std::size_t k = 0; k < fields.size(); ++k) out << (k ? "," : "") << fields[k].key;
  out << '\n';
  for (std::size_t k = 0; k < fields.size(); ++k) {
    out << (k ? "," : "") << fmt::format("{}", fields[k].get(report));
  }
  out << '\n';
}

KpiReport read_kpi_csv(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  const auto& fields = kpi_fields();
  if (lines.empty()) throw DataError(fmt::format("{}: empty file", path.string()));
  const auto header = csv::split(csv::trim(lines[0]));
  bool header_ok = header.size() == fields.size();
  for (std::size_t k = 0; header_ok && k < fields.size(); ++k) {
    header_ok = header[k] == fields[k].key;
  }
  if (!header_ok) {
    throw DataError(fmt::format("{}: row 1: unexpected KPI header", path.string()));
  }
  if (lines.size() < 2 || csv::trim(lines[1]).empty()) {
    throw DataError(fmt::format("{}: row 2: missing KPI values", path.string()));
  }
  const std::string where = fmt::format("{}: row 2", path.string());
  const auto cols = csv::split(csv::trim(lines[1]));
  if (cols.size() != fields.size()) {
    throw DataError(fmt::format("{}: expected {} columns, got {}", where, fields.size(),
                                cols.size()));
  }
  KpiReport report;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    fields[k].set(report, csv::parse_double(cols[k], where));
  }
  return report;
}

void write_comparison_csv(std::ostream& out, const KpiReport& baseline,
                          const KpiReport& other, const KpiDifference& d) {
  out << "row,overload_hours,load_factor,daily_avg_coincidence_factor,"
         "avg_charging_cost_dkk_per_kwh,avg_emissions_kg_per_kwh,"
         "dso_tariff_revenue_dkk,dissatisfaction_count,compensation_total_dkk,"
         "max_peak_kw\n";
  auto values = [&](const char* name, const KpiReport& r) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", name, r.overload_hours,
                       r.load_factor, r.daily_avg_coincidence_factor,
                       r.avg_charging_cost, r.avg_emissions, r.dso_tariff_revenue,
                       r.dissatisfaction_count, r.compensation_total, r.max_peak_kw);
  };
  values("baseline", baseline);
  values("other", other);
  auto pct = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.1f}%", *v) : std::string("-");
  };
  out << fmt::format("percent_difference,{},{},{},{},{},{},{},{},{}\n",
                     pct(d.overload_hours), pct(d.load_factor),
                     pct(d.daily_avg_coincidence_factor), pct(d.avg_charging_cost),
                     pct(d.avg_emissions), pct(d.dso_tariff_revenue),
                     pct(d.dissatisfaction_count), pct(d.compensation_total),
                     pct(d.max_peak_kw));
}

std::string format_kpi_table(const KpiReport& r) {
  std::string out;
  out += fmt::format("{:<34}{:>16.2f}\n", "overload hours", r.overload_hours);
  out += fmt::format("{:<34}{:>16.2f}\n", "max peak (kW)", r.max_peak_kw);
  out += fmt::format("{:<34}{:>16.4f}\n", "load factor", r.load_factor);
  out += fmt::format("{:<34}{:>16.4f}\n", "daily avg coincidence factor",
                     r.daily_avg_coincidence_factor);
  out += fmt::format("{:<34}{:>16.4f}\n", "avg charging cost (DKK/kWh)", r.avg_charging_cost);
  out += fmt::format("{:<34}{:>16.4f}\n", "avg emissions (kg/kWh)", r.avg_emissions);
  out += fmt::format("{:<34}{:>16.2f}\n", "DSO tariff revenue (DKK)", r.dso_tariff_revenue);
  out += fmt::format("{:<34}{:>16}\n", "dissatisfaction events", r.dissatisfaction_count);
  out += fmt::format("{:<34}{:>16.2f}\n", "compensation total (DKK)", r.compensation_total);
  out += fmt::format("{:<34}{:>16.2f}\n", "total charging cost (DKK)", r.total_charging_cost);
  out += fmt::format("{:<34}{:>16.2f}\n", "total charged (kWh)", r.total_charged_kwh);
  return out;
}

std::string format_comparison(const KpiReport& a, const KpiReport& b,
                              const KpiDifference& d) {
  std::string out = fmt::format("{:<30}{:>16}{:>16}{:>12}\n", "kpi", "baseline",
                                "other", "change");
  auto row = [&](const char* name, double x, double y,
                 const std::optional<double>& change) {
    out += fmt::format("{:<30}{:>16.4f}{:>16.4f}{:>12}\n", name, x, y, opt_percent(change));
  };
  row("overload_hours", a.overload_hours, b.overload_hours, d.overload_hours);
  row("max_peak_kw", a.max_peak_kw, b.max_peak_kw, d.max_peak_kw);
  row("load_factor", a.load_factor, b.load_factor, d.load_factor);
  row("daily_avg_cf", a.daily_avg_coincidence_factor, b.daily_avg_coincidence_factor,
      d.daily_avg_coincidence_factor);
  row("avg_charging_cost", a.avg_charging_cost, b.avg_charging_cost, d.avg_charging_cost);
  row("avg_emissions", a.avg_emissions, b.avg_emissions, d.avg_emissions);
  row("dso_tariff_revenue", a.dso_tariff_revenue, b.dso_tariff_revenue,
      d.dso_tariff_revenue);
  row("dissatisfaction", static_cast<double>(a.dissatisfaction_count),
      static_cast<double>(b.dissatisfaction_count), d.dissatisfaction_count);
  row("compensation_total", a.compensation_total, b.compensation_total,
      d.compensation_total);
  return out;
}

std::string file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("{}: cannot open", path.string()));
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "gridflex_version = " << m.tool_version << '\n';
  out << "command = " << m.command_line << '\n';
  out << "config = " << m.config_path << '\n';
  out << "out_dir = " << m.out_dir << '\n';
  out << "seed = " << m.seed << '\n';
  out << "strategy = " << m.strategy << '\n';
  out << "start = " << m.start << '\n';
  out << "days = " << m.days << '\n';
  for (const auto& e : m.inputs) out << "input " << e.key << " = " << e.value << '\n';
  for (const auto& e : m.outputs) out << "output " << e.key << " = " << e.value << '\n';
  for (const auto& w : m.warnings) out << "warning = " << w << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  const auto lines = csv::read_lines(path);
  RunManifest m;
  bool have_start = false;
  bool have_days = false;
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto text = csv::trim(lines[row]);
    if (text.empty()) continue;
    const std::string where = fmt::format("{}: row {}", path.string(), row + 1);
    // Values may be empty, in which case trimming ate the blank after '='.
    auto eq = text.find(" = ");
    if (eq == std::string_view::npos && text.ends_with(" =")) eq = text.size() - 2;
    if (eq == std::string_view::npos) throw DataError(where + ": expected 'key = value'");
    const auto key = text.substr(0, eq);
    const std::string value(csv::trim(text.substr(eq + 2)));
    if (key == "gridflex_version") m.tool_version = value;
    else if (key == "command") m.command_line = value;
    else if (key == "config") m.config_path = value;
    else if (key == "out_dir") m.out_dir = value;
    else if (key == "seed") m.seed = static_cast<std::uint64_t>(csv::parse_int(value, where));
    else if (key == "strategy") m.strategy = value;
    else if (key == "start") { m.start = value; have_start = true; }
    else if (key == "days") {
      m.days = static_cast<int>(csv::parse_int(value, where));
      have_days = true;
    }
    else if (key.starts_with("input ")) m.inputs.push_back({std::string(key.substr(6)), value});
    else if (key.starts_with("output ")) m.outputs.push_back({std::string(key.substr(7)), value});
    else if (key == "warning") m.warnings.push_back(value);
    else throw DataError(fmt::format("{}: unknown key '{}'", where, key));
  }
  if (!have_start || !have_days) {
    throw DataError(fmt::format("{}: manifest lacks start or days", path.string()));
  }
  return m;
}

RunManifest make_manifest(const ScenarioConfig& config,
                          const std::filesystem::path& config_path,
                          const std::filesystem::path& out_dir,
                          const std::vector<std::string>& warnings,
                          const std::string& command_line) {
  RunManifest m;
  m.tool_version = GRIDFLEX_VERSION_STRING;
  m.command_line = command_line;
  m.config_path = config_path.string();
  m.out_dir = out_dir.string();
  m.seed = config.seed;
  m.strategy = to_string(config.strategy);
  m.start = format_timestamp(config.start);
  m.days = config.days;
  m.warnings = warnings;
  for (const auto& p : {config.spot_csv, config.baseload_csv, config.intensity_csv,
                        config.fleet_csv}) {
    m.inputs.push_back({p.string(), file_checksum(p)});
  }
  return m;
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("{}: cannot open for writing", path.string()));
  writer(out);
  out.flush();
  if (!out) throw DataError(fmt::format("{}: write failed", path.string()));
}

}  // namespace

void write_manifest_file(const std::filesystem::path& dir, const RunManifest& manifest) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw DataError(fmt::format("{}: cannot create output directory: {}",
                                dir.string(), ec.message()));
  }
  write_file(dir / kManifestName, [&](std::ostream& o) { write_manifest(o, manifest); });
}

void write_run_outputs(const std::filesystem::path& dir,
                       const SimulationResult& result, const KpiReport& report,
                       RunManifest& manifest) {
  const std::pair<const char*, std::function<void(std::ostream&)>> files[] = {
      {"load.csv", [&](std::ostream& o) { write_load_csv(o, result); }},
      {"sessions.csv", [&](std::ostream& o) { write_sessions_csv(o, result); }},
      {"compensation.csv", [&](std::ostream& o) { write_compensation_csv(o, result); }},
      {"kpi.csv", [&](std::ostream& o) { write_kpi_csv(o, report); }},
      {"kpi.txt", [&](std::ostream& o) { o << format_kpi_table(report); }},
      {"events.log", [&](std::ostream& o) { write_event_log(o, result); }},
  };
  manifest.outputs.clear();
  for (const auto& [name, writer] : files) {
    const auto path = dir / name;
    write_file(path, writer);
    manifest.outputs.push_back({name, file_checksum(path)});
  }
  write_manifest_file(dir, manifest);
}

}  // namespace gridflex
