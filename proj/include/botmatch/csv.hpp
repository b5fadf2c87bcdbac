#ifndef BOTMATCH_CSV_HPP
#define BOTMATCH_CSV_HPP

// RFC 4180 style reader/writer: quoted fields, doubled quotes, embedded
// newlines inside quotes.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "botmatch/error.hpp"

namespace botmatch::csv {

using Row = std::vector<std::string>;

/// Reads the next record. Returns nullopt at end of stream. Sets `ok` to false
/// when a quoted field is left unterminated.
inline std::optional<Row> read_row(std::istream& in, bool* ok = nullptr) {
  if (ok) *ok = true;
  if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
  Row row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return std::nullopt;
  if (quoted && ok) *ok = false;
  row.push_back(std::move(field));
  return row;
}

inline std::string escape(std::string_view field) {
  const bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

/// Reads a header row and checks it against `expected` (exact match).
inline void expect_header(std::istream& in, const Row& expected, std::string_view what) {
  auto header = read_row(in);
  if (!header || *header != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    fail(ErrorKind::format, std::string(what) + ": expected header \"" + want + "\"");
  }
}

}  // namespace botmatch::csv

#endif  // BOTMATCH_CSV_HPP
