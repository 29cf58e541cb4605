#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ddelast {

/// Numeric CSV table: a header row followed by rows of decimal numbers.
/// Lines starting with '#' and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in, const std::string& source_name = "<stream>");
CsvTable read_csv(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace ddelast
