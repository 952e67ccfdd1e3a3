#include "paternalism/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include <fmt/format.h>

#include "paternalism/errors.hpp"

namespace paternalism::csv {

std::string format_number(double v, std::optional<int> digits) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (digits) return fmt::format("{:.{}f}", v, *digits);
  return fmt::format("{}", v);
}

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& field : out) {
    const auto b = field.find_first_not_of(" \t");
    const auto e = field.find_last_not_of(" \t");
    field = b == std::string::npos ? std::string{} : field.substr(b, e - b + 1);
  }
  return out;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError(fmt::format("missing CSV column '{}'", name));
}

bool Table::has_column(std::string_view name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

namespace {

bool skippable(const std::string& line) {
  const auto b = line.find_first_not_of(" \t\r");
  return b == std::string::npos || line[b] == '#';
}

}  // namespace

Table read(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    auto fields = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size())
      throw DomainError(fmt::format("CSV line {}: expected {} fields, found {}", lineno, t.header.size(),
                                    fields.size()));
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw DomainError("CSV input is empty");
  return t;
}

double parse_double(std::string_view s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw DomainError(fmt::format("not a number: '{}'", s));
  return v;
}

long long parse_int(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw DomainError(fmt::format("not an integer: '{}'", s));
  return v;
}

std::vector<std::vector<double>> read_numeric(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    const auto fields = split_line(line);
    std::vector<double> row;
    row.reserve(fields.size());
    try {
      for (const auto& f : fields) row.push_back(parse_double(f));
    } catch (const DomainError&) {
      // A non-numeric first line is a header.
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace paternalism::csv
