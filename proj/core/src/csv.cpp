#include "gridflex/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "gridflex/error.hpp"

namespace gridflex::csv {

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' ||
                           text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const auto comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(begin)));
      break;
    }
    fields.push_back(trim(line.substr(begin, comma - begin)));
    begin = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::string_view context) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} ||
      ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw DataError(std::string(context) + ": cannot parse '" +
                    std::string(field) + "' as a number");
  }
  return value;
}

long long parse_int(std::string_view field, std::string_view context) {
  field = trim(field);
  long long value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} ||
      ptr != field.data() + field.size()) {
    throw DataError(std::string(context) + ": cannot parse '" +
                    std::string(field) + "' as an integer");
  }
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open file '" + path.string() + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace gridflex::csv
