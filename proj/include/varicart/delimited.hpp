#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace varicart {

using Row = std::vector<std::string>;

// RFC 4180-style reader: quoted fields may contain the delimiter, doubled
// quotes and line breaks. CRLF line endings are accepted.
class DelimitedReader {
 public:
  DelimitedReader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {}

  // Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<Row> next();
  // 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  char delim_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

std::string quote_field(const std::string& field, char delimiter);
void write_row(std::ostream& out, const Row& row, char delimiter);

// Comma for *.csv, tab otherwise.
char delimiter_for_path(const std::string& path);

}  // namespace varicart
