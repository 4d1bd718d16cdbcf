#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace honeygen::dsv {

// Splits one record of delimiter-separated values. Double quotes group a
// field and "" inside quotes is a literal quote. Returns false on an
// unterminated quote.
inline bool split_record(std::string_view line, char delimiter, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return !quoted;
}

inline std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  split_record(line, delimiter, fields);
  return fields;
}

inline std::string quote_field(std::string_view field, char delimiter) {
  const bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                            std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace honeygen::dsv
