#include "table.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace qamp::cli {

namespace {

struct CsvText {
  std::string operator()(double v) const { return format_number(v); }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(bool v) const { return v ? "true" : "false"; }
  std::string operator()(const std::string& v) const { return v; }
  std::string operator()(NotAvailable) const { return "n/a"; }
  std::string operator()(InfiniteValue) const { return "inf"; }
};

struct JsonValue {
  nlohmann::json operator()(double v) const {
    // round-trip through the printed form so CSV and JSON agree digit for digit
    return std::stod(format_number(v));
  }
  nlohmann::json operator()(long long v) const { return v; }
  nlohmann::json operator()(bool v) const { return v; }
  nlohmann::json operator()(const std::string& v) const { return v; }
  nlohmann::json operator()(NotAvailable) const { return nullptr; }
  nlohmann::json operator()(InfiniteValue) const { return "inf"; }
};

}  // namespace

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "n/a";
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

Cell gain_cell(const Gain& g) {
  if (g.is_infinite()) return InfiniteValue{};
  return g.linear();
}

Cell gain_db_cell(const Gain& g) {
  if (g.is_infinite()) return InfiniteValue{};
  if (g.linear() == 0.0) return NotAvailable{};
  return g.db();
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::logic_error("row width does not match the header");
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& os, Format format) const {
  if (format == Format::Csv) {
    write_csv(os);
  } else {
    write_json(os);
  }
}

void Table::write_csv(std::ostream& os) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << std::visit(CsvText{}, row[i]);
    os << '\n';
  }
}

void Table::write_json(std::ostream& os) const {
  nlohmann::json doc;
  doc["columns"] = columns_;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : rows_) {
    auto& out = doc["rows"].emplace_back(nlohmann::json::array());
    for (const auto& cell : row) out.push_back(std::visit(JsonValue{}, cell));
  }
  os << doc.dump() << '\n';
}

}  // namespace qamp::cli
