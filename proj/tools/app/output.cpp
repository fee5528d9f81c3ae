#include "output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace nullkit::app {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("row width does not match table " + name);
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return csv_field(v);
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        // JSON has no non-finite numbers; they are written as strings
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_double(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

std::string render_csv(const std::vector<Table>& tables) {
  std::ostringstream os;
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const auto& T = tables[t];
    if (tables.size() > 1) os << (t ? "\n" : "") << "# " << T.name << "\n";
    for (std::size_t i = 0; i < T.columns.size(); ++i) os << (i ? "," : "") << csv_field(T.columns[i]);
    os << "\n";
    for (const auto& row : T.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
      os << "\n";
    }
  }
  return os.str();
}

std::string render_json(const Metadata& meta, const std::vector<Table>& tables) {
  nlohmann::ordered_json root;
  root["metadata"] = {{"command", meta.command},
                      {"config_hash", meta.config_hash},
                      {"seed", meta.seed},
                      {"version", meta.version},
                      {"float_digits", 17}};
  nlohmann::ordered_json ts = nlohmann::ordered_json::object();
  for (const auto& T : tables) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : T.rows) {
      nlohmann::ordered_json rec = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) rec[T.columns[i]] = cell_json(row[i]);
      arr.push_back(std::move(rec));
    }
    ts[T.name] = std::move(arr);
  }
  root["tables"] = std::move(ts);
  return root.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace nullkit::app
