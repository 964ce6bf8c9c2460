#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace audit::csv {

/// A parsed CSV table: header row plus data rows, all fields as strings.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or throws InputError naming the column.
  std::size_t column(const std::string& name) const;
};

/// Parses RFC-4180-style CSV: comma separated, double-quote quoting with
/// "" escapes, tolerant of trailing \r. The first row is the header.
Table parse(std::istream& in, const std::string& source_name = "<stream>");
Table parse_string(const std::string& text, const std::string& source_name = "<string>");
Table read_file(const std::string& path);

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

/// Joins fields into one CSV line (no trailing newline).
std::string join(const std::vector<std::string>& fields);

}  // namespace audit::csv
