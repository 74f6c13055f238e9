#include "varicart/delimited.hpp"

#include <istream>
#include <ostream>

#include "varicart/common.hpp"

namespace varicart {

std::optional<Row> DelimitedReader::next() {
  while (true) {
    int c = in_.peek();
    if (c == std::char_traits<char>::eof()) return std::nullopt;
    if (c == '\n') {
      in_.get();
      ++line_;
      continue;
    }
    if (c == '\r') {
      in_.get();
      continue;
    }
    break;
  }

  record_line_ = line_;
  Row row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  while (true) {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw DataError("unterminated quoted field starting on line " + std::to_string(record_line_));
      row.push_back(std::move(field));
      return row;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == delim_) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\n') {
      ++line_;
      row.push_back(std::move(field));
      return row;
    } else if (ch == '\r') {
      if (in_.peek() != '\n') field.push_back(ch);
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
}

std::string quote_field(const std::string& field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row, char delimiter) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << delimiter;
    out << quote_field(row[i], delimiter);
  }
  out << '\n';
}

char delimiter_for_path(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return ',';
  return '\t';
}

}  // namespace varicart
