#pragma once

#include <filesystem>
#include <string>

#include "smb/scenario/scenario.hpp"

namespace smb::cli {

/// Runs an echo scenario with every component in its own OS process.
scenario::RunOutcome run_spawned(const scenario::Scenario& s, const std::filesystem::path& scenario_file,
                                 const std::string& self_exe);

struct ComponentArgs {
  std::filesystem::path scenario_file;
  std::string name;
  std::string broker;
  std::filesystem::path directory;
  std::filesystem::path ready_file;
  std::filesystem::path result_file;
  std::uint64_t seed = 0;
  bool seeded = false;
};

/// Body of a spawned child.
int run_component(const ComponentArgs& args);

}  // namespace smb::cli
