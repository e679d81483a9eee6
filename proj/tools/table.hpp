#pragma once

// Column-oriented output shared by every subcommand: CSV with a header row,
// or JSON {"columns": [...], "rows": [[...], ...]}.

#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "qamp/gain.hpp"

namespace qamp::cli {

struct NotAvailable {};
struct InfiniteValue {};

using Cell = std::variant<double, long long, bool, std::string, NotAvailable, InfiniteValue>;

enum class Format { Csv, Json };

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write(std::ostream& os, Format format) const;
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// 12 significant digits.
std::string format_number(double value);

Cell gain_cell(const Gain& g);     // linear value or inf
Cell gain_db_cell(const Gain& g);  // dB value or inf
template <class T>
Cell optional_cell(const T& opt) {
  return opt ? Cell(*opt) : Cell(NotAvailable{});
}

}  // namespace qamp::cli
