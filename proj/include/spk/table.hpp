#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "spk/error.hpp"

namespace spk {

/// A table cell: text, an exact integer, or a real. std::monostate is an
/// empty cell (blank in CSV, null in JSON).
using Cell = std::variant<std::monostate, std::string, std::int64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table& add_row(std::vector<Cell> row) {
    rows.push_back(std::move(row));
    return *this;
  }
};

/// 12 significant digits; integral values come out without a decimal point.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s(buf);
  return s == "-0" ? "0" : s;
}

namespace detail {

inline void check_rows(const Table& t) {
  for (const auto& r : t.rows)
    if (r.size() != t.columns.size()) throw InputError("ragged table row");
}

inline std::string csv_field(const std::string& s) {
  const bool quote = s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string cell_text(const Cell& c) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_number(d); }
  } visit;
  return std::visit(visit, c);
}

inline std::string json_cell(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "null";
  if (const auto* s = std::get_if<std::string>(&c)) return nlohmann::json(*s).dump();
  if (const auto* d = std::get_if<double>(&c); d && !std::isfinite(*d)) return "null";
  return cell_text(c);
}

}  // namespace detail

/// RFC-4180-style CSV with a header row and LF line endings.
inline std::string to_csv(const Table& t) {
  detail::check_rows(t);
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + detail::csv_field(t.columns[i]);
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + detail::csv_field(detail::cell_text(r[i]));
    out += '\n';
  }
  return out;
}

/// JSON array of objects with keys in column order; numbers use the same
/// 12-digit formatting as CSV.
inline std::string to_json_text(const Table& t) {
  detail::check_rows(t);
  std::string out = "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",\n {" : "\n {";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (i) out += ", ";
      out += nlohmann::json(t.columns[i]).dump() + ": " + detail::json_cell(t.rows[r][i]);
    }
    out += "}";
  }
  out += t.rows.empty() ? "]\n" : "\n]\n";
  return out;
}

enum class TableFormat { csv, json };

inline std::string emit_table(const Table& t, TableFormat f) { return f == TableFormat::csv ? to_csv(t) : to_json_text(t); }

/// Minimal CSV reader for tables produced by to_csv (quoted fields, no embedded newlines).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (quoted) {
        if (c == '"' && pos + 1 < text.size() && text[pos + 1] == '"') {
          field += '"';
          ++pos;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else if (c == '\n') {
        ++pos;
        break;
      } else {
        field += c;
      }
    }
    row.push_back(std::move(field));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace spk
