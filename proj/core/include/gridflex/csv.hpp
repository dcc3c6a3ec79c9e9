#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gridflex::csv {

// Splits one line on commas and trims surrounding blanks from each field.
// Quoting is not supported; none of the formats we read need it.
std::vector<std::string_view> split(std::string_view line);

std::string_view trim(std::string_view text);

// Strict parses: the whole field must be consumed. Throw DataError with
// `context` in the message on failure.
double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

// Reads every line of a text file; throws DataError naming the file when it
// cannot be opened. A trailing '\r' is stripped from each line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace gridflex::csv
