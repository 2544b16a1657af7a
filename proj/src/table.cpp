#include "fraclap/table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace fraclap::table {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& cell) {
            using T = std::decay_t<decltype(cell)>;
            if constexpr (std::is_same_v<T, double>) {
              out += format_real(cell);
            } else if constexpr (std::is_same_v<T, long long>) {
              out += std::to_string(cell);
            } else if constexpr (std::is_same_v<T, std::string>) {
              out += csv_escape(cell);
            }
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["columns"] = t.columns;
  auto& rows = doc["rows"];
  rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Empty>) {
              jrow.push_back(nullptr);
            } else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v))
                jrow.push_back(v);
              else
                jrow.push_back(nullptr);
            } else {
              jrow.push_back(v);
            }
          },
          cell);
    }
    rows.push_back(std::move(jrow));
  }
  return doc.dump(2) + "\n";
}

}  // namespace fraclap::table
