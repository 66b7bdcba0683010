#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace strata::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;

  // Column position by (case-insensitive) name.
  std::optional<std::size_t> column(std::string_view name) const;
  // Throws Error(MissingColumn).
  std::size_t require(std::string_view name) const;
};

// RFC 4180: quoted fields, doubled quotes, embedded newlines, CRLF or LF.
Table read(std::istream& in);
Table read_file(const std::string& path);
Table read_string(std::string_view text);

std::string quote(std::string_view field);
void write_row(std::ostream& out, const Row& row);

// Shortest round-tripping text for a double; empty for NaN.
std::string format_number(double v);

}  // namespace strata::csv
