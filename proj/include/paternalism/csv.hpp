#pragma once

// Minimal CSV dialect shared by every reader and writer in the project:
// comma separated, LF line endings, '.' decimal separator, '#' comment lines.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paternalism::csv {

// Shortest round-trip representation, or fixed notation with `digits`
// decimals when given. Infinities are written as "inf" / "-inf".
std::string format_number(double v, std::optional<int> digits = std::nullopt);

std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws DomainError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

// Reads a header line followed by data rows; blank and '#' lines are skipped.
// Rows whose width differs from the header raise DomainError.
Table read(std::istream& in);

// Headerless numeric matrix (one row per line).
std::vector<std::vector<double>> read_numeric(std::istream& in);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace paternalism::csv
