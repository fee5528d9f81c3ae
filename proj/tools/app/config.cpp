#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace nullkit::app {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double extended_number(const Json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ConfigError(where + ": expected a number, \"inf\" or \"-inf\"");
}

Block::Block(const Json& j, std::string where) : j_(&j), where_(std::move(where)) {
  if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
}

bool Block::has(const std::string& key) const { return j_->contains(key); }

const Json& Block::at(const std::string& key) {
  if (!j_->contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
  used_.push_back(key);
  return (*j_)[key];
}

const Json& Block::raw(const std::string& key) { return at(key); }

double Block::number(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError(where_ + "." + key + ": expected a number");
  return v.get<double>();
}

double Block::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

double Block::extended(const std::string& key, double fallback) {
  return has(key) ? extended_number(at(key), where_ + "." + key) : fallback;
}

double Block::positive(const std::string& key, double fallback) {
  const double v = number(key, fallback);
  if (!(v > 0)) throw ConfigError(where_ + "." + key + ": must be positive");
  return v;
}

int Block::integer(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + ": expected an integer");
  return v.get<int>();
}

bool Block::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(where_ + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string Block::string(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError(where_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Block::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Block::numbers(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_array()) throw ConfigError(where_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(extended_number(e, where_ + "." + key));
  return out;
}

Vec Block::vector(const std::string& key) {
  const auto xs = numbers(key);
  return Eigen::Map<const Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

std::vector<Vec> Block::points(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_array()) throw ConfigError(where_ + "." + key + ": expected an array of points");
  std::vector<Vec> out;
  for (const auto& p : v) {
    if (!p.is_array()) throw ConfigError(where_ + "." + key + ": every point must be an array");
    Vec x(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) x[static_cast<Eigen::Index>(i)] = extended_number(p[i], where_ + "." + key);
    out.push_back(x);
  }
  return out;
}

std::pair<double, double> Block::interval(const std::string& key, std::pair<double, double> fallback) {
  if (!has(key)) return fallback;
  const auto v = numbers(key);
  if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError(where_ + "." + key + ": expected [lo, hi] with lo < hi");
  return {v[0], v[1]};
}

Block Block::child(const std::string& key) { return Block(at(key), where_ + "." + key); }

std::map<std::string, double> Block::params(const std::string& key) {
  std::map<std::string, double> out;
  if (!has(key)) return out;
  const Json& v = at(key);
  if (!v.is_object()) throw ConfigError(where_ + "." + key + ": expected an object of numbers");
  for (const auto& [k, val] : v.items()) {
    if (!val.is_number()) throw ConfigError(where_ + "." + key + "." + k + ": expected a number");
    out[k] = val.get<double>();
  }
  return out;
}

void Block::finish() const {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : j_->items())
    if (std::find(used_.begin(), used_.end(), k) == used_.end()) unknown.push_back(k);
  if (unknown.empty()) return;
  std::string msg = where_ + ": unknown key";
  if (unknown.size() > 1) msg += "s";
  for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", '" : " '") + unknown[i] + "'";
  throw ConfigError(msg);
}

FibrePtr build_fibre(Block b, const std::map<std::string, double>& params) {
  const std::string type = b.string("type");
  FibrePtr F;
  if (type == "euclidean") {
    F = std::make_shared<EuclideanFibre>(b.integer("dim", 3));
  } else if (type == "sphere") {
    F = std::make_shared<SphereFibre>(b.integer("dim", 3), b.positive("radius", 1.0));
  } else if (type == "hyperbolic") {
    const double k = b.number("curvature", -1.0);
    if (!(k < 0)) throw ConfigError(b.where() + ".curvature: must be negative");
    F = std::make_shared<HyperbolicFibre>(b.integer("dim", 3), k);
  } else if (type == "product") {
    const Json& fs = b.raw("factors");
    if (!fs.is_array() || fs.empty()) throw ConfigError(b.where() + ".factors: expected a non-empty array");
    std::vector<FibrePtr> parts;
    for (std::size_t i = 0; i < fs.size(); ++i)
      parts.push_back(build_fibre(Block(fs[i], b.where() + ".factors[" + std::to_string(i) + "]"), params));
    F = std::make_shared<ProductFibre>(parts);
  } else if (type == "warped") {
    const auto [a, bb] = b.interval("base", {-kInf, kInf});
    const std::string mu = b.string("mu");
    const FibrePtr leaf = build_fibre(b.child("leaf"), params);
    std::vector<std::string> vars{"s"};
    for (const auto& n : leaf->coordinate_names()) vars.push_back(n);
    F = std::make_shared<TwistedFibre>(a, bb, leaf, ScalarField::parse(mu, vars, params));
  } else if (type == "metric") {
    const Json& cs = b.raw("coordinates");
    const Json& comps = b.raw("components");
    std::vector<std::string> coords;
    for (const auto& c : cs) {
      if (!c.is_string()) throw ConfigError(b.where() + ".coordinates: expected strings");
      coords.push_back(c.get<std::string>());
    }
    const int m = static_cast<int>(coords.size());
    std::vector<std::vector<std::string>> g;
    if (!comps.is_array() || static_cast<int>(comps.size()) != m)
      throw ConfigError(b.where() + ".components: expected a square array of expressions");
    for (const auto& row : comps) {
      if (!row.is_array() || static_cast<int>(row.size()) != m)
        throw ConfigError(b.where() + ".components: expected a square array of expressions");
      std::vector<std::string> r;
      for (const auto& e : row) {
        if (!e.is_string()) throw ConfigError(b.where() + ".components: entries must be strings");
        r.push_back(e.get<std::string>());
      }
      g.push_back(r);
    }
    ChartBox box{Vec::Constant(m, -1e6), Vec::Constant(m, 1e6)};
    if (b.has("box")) {
      auto corners = b.points("box");
      if (corners.size() != 2 || corners[0].size() != m || corners[1].size() != m)
        throw ConfigError(b.where() + ".box: expected [[lo...], [hi...]]");
      box = {corners[0], corners[1]};
    }
    F = std::make_shared<ExpressionMetricFibre>(coords, g, box, params, b.positive("injectivity", 0.5));
  } else {
    throw ConfigError(b.where() + ".type: unknown fibre type '" + type +
                      "' (euclidean, sphere, hyperbolic, product, warped, metric)");
  }
  b.finish();
  return F;
}

std::vector<std::string> Spacetime::coordinates() const {
  if (fibre) return fibre->coordinate_names();
  return {"s"};
}

const GrwSpace& Spacetime::require_grw(const std::string& command) const {
  if (!grw) throw ConfigError("command '" + command + "' needs a spacetime of kind grw");
  return *grw;
}

Spacetime build_spacetime(Block b) {
  Spacetime S;
  S.kind = b.string("kind");
  S.params = b.params("params");
  if (S.kind == "grw") {
    S.fibre = build_fibre(b.child("fibre"), S.params);
    const auto [lo, hi] = b.interval("interval", {-kInf, kInf});
    S.grw = std::make_shared<GrwSpace>(WarpingProfile::parse(b.string("warping"), lo, hi, S.params), S.fibre);
  } else if (S.kind == "static") {
    S.fibre = build_fibre(b.child("fibre"), S.params);
    StaticModel M;
    M.fibre = S.fibre;
    M.phi = ScalarField::parse(b.string("potential"), S.fibre->coordinate_names(), S.params);
    S.static_model = M;
  } else if (S.kind == "radial-static") {
    const auto [lo, hi] = b.interval("interval", {0.0, kInf});
    S.radial = RadialStaticFamily::parse(b.string("profile"), lo, hi, S.params);
  } else {
    throw ConfigError(b.where() + ".kind: expected grw, static or radial-static");
  }
  b.finish();
  return S;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  JobConfig cfg;
  cfg.text = ss.str();
  Json j;
  try {
    j = Json::parse(cfg.text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  Block root(j, "config");
  if (root.has("spacetime")) cfg.spacetime = build_spacetime(root.child("spacetime"));
  if (root.has("tasks")) {
    const Json& ts = root.raw("tasks");
    if (!ts.is_array()) throw ConfigError("config.tasks: expected an array");
    for (const auto& t : ts) {
      if (!t.is_object()) throw ConfigError("config.tasks: every task must be an object");
      cfg.tasks.push_back(t);
    }
  }
  if (root.has("output")) {
    Block o = root.child("output");
    cfg.output.format = o.string("format", "csv");
    cfg.output.path = o.string("path", "");
    o.finish();
  }
  if (cfg.output.format != "csv" && cfg.output.format != "json")
    throw ConfigError("config.output.format: expected csv or json");
  root.finish();
  return cfg;
}

}  // namespace nullkit::app
