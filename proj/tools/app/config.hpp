#pragma once

// JSON job configuration: {"spacetime": {...}, "tasks": [...], "output": {...}}.

#include "nullkit/grw.hpp"
#include "nullkit/staticspace.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullkit::app {

using Json = nlohmann::json;

/// Usage or configuration problem; maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Object view that records which keys were read so that leftovers can be
/// rejected.
class Block {
 public:
  Block(const Json& j, std::string where);

  bool has(const std::string& key) const;
  const Json& raw(const std::string& key);
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  /// Number that may also be the string "inf" or "-inf".
  double extended(const std::string& key, double fallback);
  double positive(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string string(const std::string& key);
  std::string string(const std::string& key, const std::string& fallback);
  Vec vector(const std::string& key);
  std::vector<double> numbers(const std::string& key);
  std::vector<Vec> points(const std::string& key);
  std::pair<double, double> interval(const std::string& key, std::pair<double, double> fallback);
  Block child(const std::string& key);
  std::map<std::string, double> params(const std::string& key);

  /// Throws ConfigError naming every key that was never read.
  void finish() const;
  const std::string& where() const { return where_; }

 private:
  const Json& at(const std::string& key);
  const Json* j_;
  std::string where_;
  std::vector<std::string> used_;
};

double extended_number(const Json& v, const std::string& where);

struct Spacetime {
  std::string kind;  // grw | static | radial-static
  std::map<std::string, double> params;
  std::shared_ptr<const GrwSpace> grw;
  FibrePtr fibre;
  std::optional<StaticModel> static_model;
  std::optional<RadialStaticFamily> radial;

  std::vector<std::string> coordinates() const;
  const GrwSpace& require_grw(const std::string& command) const;
};

FibrePtr build_fibre(Block b, const std::map<std::string, double>& params);
Spacetime build_spacetime(Block b);

struct OutputSpec {
  std::string format = "csv";
  std::string path;  // empty: stdout
};

struct JobConfig {
  std::optional<Spacetime> spacetime;
  std::vector<Json> tasks;
  OutputSpec output;
  std::string text;  // raw file contents, for the config hash
};

JobConfig load_config(const std::string& path);

}  // namespace nullkit::app
