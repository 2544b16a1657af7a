#ifndef FRACLAP_TABLE_HPP
#define FRACLAP_TABLE_HPP

#include <string>
#include <variant>
#include <vector>

// Row/column tables with deterministic CSV and JSON serialization.  Reals
// are emitted with 17 significant digits so output files are byte-identical
// across runs and round-trip exactly.

namespace fraclap::table {

struct Empty {};
using Cell = std::variant<Empty, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string format_real(double v);

std::string to_csv(const Table& t);
std::string to_json(const Table& t);

}  // namespace fraclap::table

#endif
