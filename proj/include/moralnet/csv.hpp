#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "moralnet/error.hpp"
#include "moralnet/tokens.hpp"

namespace moralnet::csv {

using Row = std::vector<std::string>;

// RFC 4180 style reader: quoted fields may hold commas, quotes ("") and
// newlines. Tracks the 1-based line on which each record starts.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  bool next(Row& row) {
    row.clear();
    int ch = in_.get();
    if (ch == EOF) return false;
    record_line_ = ++line_;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    for (;; ch = in_.get()) {
      if (ch == EOF) {
        row.push_back(std::move(field));
        return true;
      }
      char c = static_cast<char>(ch);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        quoted = true;
        field_was_quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
      } else if (c == '\n') {
        row.push_back(std::move(field));
        return true;
      } else if (c != '\r') {
        field.push_back(c);
      }
    }
  }

  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
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

// Six significant digits, the precision every report uses. NaN is empty.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

inline double round_real(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

inline std::optional<double> parse_real(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Index of a header column (case-insensitive, trimmed) or -1.
inline int find_column(const Row& header, std::string_view name) {
  std::string want = normalize_token(name);
  for (std::size_t i = 0; i < header.size(); ++i)
    if (normalize_token(header[i]) == want) return static_cast<int>(i);
  return -1;
}

inline std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

}  // namespace moralnet::csv
