#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "moralnet/csv.hpp"
#include "moralnet/error.hpp"

namespace moralnet {

enum class ColumnType { text, integer, real, boolean };

struct Column {
  std::string name;
  ColumnType type = ColumnType::text;
};

using Cell = std::variant<std::string, long long, double, bool>;

// A named table. Rows are emitted sorted by `key` (column indices, compared
// left to right); an empty key sorts by the first column.
struct Report {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::size_t> key;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw ValidationError("report row has " + std::to_string(row.size()) + " cells, expected " +
                            std::to_string(columns.size()));
    rows.push_back(std::move(row));
  }
};

enum class ReportFormat { csv, json };

namespace detail {

inline int compare_cells(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* x = std::get_if<double>(&a)) {
    double y = std::get<double>(b);
    bool nx = std::isnan(*x), ny = std::isnan(y);
    if (nx || ny) return nx == ny ? 0 : (nx ? 1 : -1);
    return *x < y ? -1 : (y < *x ? 1 : 0);
  }
  return a < b ? -1 : (b < a ? 1 : 0);
}

inline void check_types(const Report& r) {
  for (const auto& row : r.rows) {
    if (row.size() != r.columns.size()) throw ValidationError("report row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) {
      static constexpr std::size_t expected[] = {0, 1, 2, 3};
      if (row[c].index() != expected[static_cast<int>(r.columns[c].type)])
        throw ValidationError("report cell type mismatch in column '" + r.columns[c].name + "'");
    }
  }
}

inline std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return csv::format_real(v);
        else return v ? "true" : "false";
      },
      c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return csv::round_real(v);
        } else {
          return v;
        }
      },
      c);
}

inline Cell parse_cell(const std::string& text, ColumnType type, const std::string& where) {
  switch (type) {
    case ColumnType::text:
      return text;
    case ColumnType::integer:
      if (auto v = csv::parse_integer(text)) return *v;
      break;
    case ColumnType::real:
      if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
      if (text == "inf") return std::numeric_limits<double>::infinity();
      if (text == "-inf") return -std::numeric_limits<double>::infinity();
      if (auto v = csv::parse_real(text)) return *v;
      break;
    case ColumnType::boolean:
      if (text == "true") return true;
      if (text == "false") return false;
      break;
  }
  throw FormatError(where + ": cannot parse '" + text + "'");
}

}  // namespace detail

inline std::vector<std::size_t> sorted_row_order(const Report& r) {
  std::vector<std::size_t> order(r.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::size_t> key = r.key.empty() ? std::vector<std::size_t>{0} : r.key;
  if (r.columns.empty()) return order;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k : key) {
      int c = detail::compare_cells(r.rows[a][k], r.rows[b][k]);
      if (c) return c < 0;
    }
    return false;
  });
  return order;
}

inline void write_report(const Report& report, std::ostream& out, ReportFormat format) {
  detail::check_types(report);
  const auto order = sorted_row_order(report);
  if (format == ReportFormat::csv) {
    csv::Row header;
    for (const auto& c : report.columns) header.push_back(c.name);
    csv::write_row(out, header);
    for (std::size_t i : order) {
      csv::Row row;
      for (const auto& cell : report.rows[i]) row.push_back(detail::cell_text(cell));
      csv::write_row(out, row);
    }
    return;
  }
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i : order) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < report.columns.size(); ++c)
      obj[report.columns[c].name] = detail::cell_json(report.rows[i][c]);
    arr.push_back(std::move(obj));
  }
  out << arr.dump(2) << '\n';
}

inline void write_report(const Report& report, const std::string& path, ReportFormat format) {
  auto out = csv::open_output(path);
  write_report(report, out, format);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Reads back a report written by write_report, typed by `columns`.
inline Report read_report(std::istream& in, const std::vector<Column>& columns, ReportFormat format,
                          const std::string& path = "<stream>") {
  Report r;
  r.columns = columns;
  if (format == ReportFormat::csv) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) throw FormatError(path + ": empty report");
    if (row.size() != columns.size()) throw FormatError(path + ": header width mismatch");
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (row[c] != columns[c].name) throw FormatError(path + ": unexpected column '" + row[c] + "'");
    while (reader.next(row)) {
      const std::string where = csv::location(path, reader.line());
      if (row.size() != columns.size()) throw FormatError(where + ": row width mismatch");
      std::vector<Cell> cells;
      for (std::size_t c = 0; c < columns.size(); ++c)
        cells.push_back(detail::parse_cell(row[c], columns[c].type, where));
      r.rows.push_back(std::move(cells));
    }
    return r;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (!doc.is_array()) throw FormatError(path + ": expected a JSON array");
  for (const auto& obj : doc) {
    std::vector<Cell> cells;
    for (const auto& col : columns) {
      if (!obj.contains(col.name)) throw FormatError(path + ": missing field '" + col.name + "'");
      const auto& v = obj[col.name];
      switch (col.type) {
        case ColumnType::text: cells.emplace_back(v.get<std::string>()); break;
        case ColumnType::integer: cells.emplace_back(v.get<long long>()); break;
        case ColumnType::real:
          cells.emplace_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
          break;
        case ColumnType::boolean: cells.emplace_back(v.get<bool>()); break;
      }
    }
    r.rows.push_back(std::move(cells));
  }
  return r;
}

}  // namespace moralnet
