#pragma once

#include "config.hpp"
#include "output.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nullkit::app {

struct CommandResult {
  std::vector<Table> tables;
  /// failed assertions, in task order
  std::vector<std::string> failures;
};

struct SeedPolicy {
  std::optional<std::uint64_t> cli;  // --seed
  std::optional<std::uint64_t> env;  // NULLKIT_SEED

  /// --seed, then the task's "seed", then NULLKIT_SEED, then 1.
  std::uint64_t resolve(std::optional<std::uint64_t> task) const;
};

const std::vector<std::string>& command_names();

/// Runs every task block whose "command" is `command` (blocks without one
/// belong to the invoked command). `fixtures` runs once even with no tasks.
CommandResult run_command(const std::string& command, const std::optional<Spacetime>& spacetime,
                          const std::vector<Json>& tasks, const SeedPolicy& seeds, std::uint64_t& seed_used);

}  // namespace nullkit::app
