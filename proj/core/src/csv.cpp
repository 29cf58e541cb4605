#include "ddelast/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "ddelast/errors.hpp"

namespace ddelast {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view cell, const std::string& where) {
  double value = 0.0;
  // from_chars rejects a leading '+', which some exporters write.
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    fail(ErrorCode::kParse, where + ": non-numeric cell '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

std::size_t CsvTable::column_index(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) fail(ErrorCode::kParse, "missing CSV column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column(std::string_view name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

CsvTable parse_csv(std::istream& in, const std::string& source_name) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_fields(view);
    if (!have_header) {
      for (auto f : fields) table.header.emplace_back(f);
      have_header = true;
      continue;
    }
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (fields.size() != table.header.size()) {
      fail(ErrorCode::kParse, where + ": expected " + std::to_string(table.header.size()) +
                                  " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, where));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorCode::kParse, source_name + ": missing header row");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

}  // namespace ddelast
