#include "app/commands.hpp"
#include "app/config.hpp"
#include "app/output.hpp"

#include "nullkit/expr.hpp"
#include "nullkit/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr const char* kVersion = "nullkit 1.0.0";

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("NULLKIT_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || s[0] == '-') throw nullkit::app::ConfigError("NULLKIT_SEED must be a non-negative integer");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nullkit::app;
  CLI::App cli{"Null hypersurfaces in GRW and standard static spacetimes"};
  cli.set_version_flag("--version", kVersion);
  std::string command, config_path, out_path, format;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  cli.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(command_names()));
  cli.add_option("--config", config_path, "JSON job configuration")->check(CLI::ExistingFile);
  cli.add_option("--out", out_path, "Output file (default: output.path or stdout)");
  cli.add_option("--format", format, "csv or json (default: output.format or csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  cli.add_option("--seed", seed, "Seed for every task block");
  cli.add_option("--threads", threads, "Worker threads (default: NULLKIT_THREADS or all cores)");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (threads) nullkit::set_thread_count(threads);
    JobConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else if (command != "fixtures") {
      throw ConfigError("--config is required for '" + command + "'");
    }
    SeedPolicy seeds{seed, env_seed()};
    std::uint64_t used = seeds.resolve(std::nullopt);
    const auto result = run_command(command, cfg.spacetime, cfg.tasks, seeds, used);

    const std::string fmt = format.empty() ? cfg.output.format : format;
    const std::string path = out_path.empty() ? cfg.output.path : out_path;
    Metadata meta{command, fnv1a_hex(cfg.text), used, kVersion};
    const std::string text = fmt == "json" ? render_json(meta, result.tables) : render_csv(result.tables);
    if (path.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(path, std::ios::binary);
      if (!os) throw ConfigError("cannot write '" + path + "'");
      os << text;
    }
    for (const auto& f : result.failures) std::cerr << "FAIL " << f << "\n";
    return result.failures.empty() ? 0 : 2;
  } catch (const nullkit::expr::ParseError& e) {
    std::cerr << "expression error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const nullkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
