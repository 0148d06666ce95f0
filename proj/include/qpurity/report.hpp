#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qpurity/format.hpp"

namespace qpurity {

using Cell = std::variant<std::string, double, std::int64_t>;

// Column-oriented report table; floating-point cells are printed with 12
// significant digits in both formats so outputs are byte-reproducible.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw std::invalid_argument("Table: row width mismatch");
    rows.push_back(std::move(row));
  }
};

inline std::string cell_to_string(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  if (const auto* d = std::get_if<double>(&c)) return fmt12(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

// RFC-4180 style quoting for cells containing separators (channel labels
// carry commas).
inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ",";
    out += csv_escape(t.columns[i]);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += csv_escape(cell_to_string(row[i]));
    }
    out += "\n";
  }
  return out;
}

// JSON mirror of the CSV fields: {"columns": [...], "rows": [{col: value}]}.
inline std::string to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["columns"] = t.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (const auto* s = std::get_if<std::string>(&c)) {
        obj[t.columns[i]] = *s;
      } else if (const auto* d = std::get_if<double>(&c)) {
        // Round-trip through the 12-digit text form so the JSON numeral
        // matches the CSV cell.
        if (std::isfinite(*d))
          obj[t.columns[i]] = std::stod(fmt12(*d));
        else
          obj[t.columns[i]] = fmt12(*d);
      } else {
        obj[t.columns[i]] = std::get<std::int64_t>(c);
      }
    }
    j["rows"].push_back(std::move(obj));
  }
  return j.dump(2) + "\n";
}

}  // namespace qpurity
