#pragma once

// Tabular results and their CSV / JSON renderings.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace nullkit::app {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Metadata {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

/// Doubles with 17 significant digits; one "# name" line precedes each table
/// when there is more than one.
std::string render_csv(const std::vector<Table>& tables);
/// {"metadata": {...}, "tables": {name: [{column: value}, ...]}}
std::string render_json(const Metadata& meta, const std::vector<Table>& tables);

std::string format_double(double v);

/// 64-bit FNV-1a, hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace nullkit::app
