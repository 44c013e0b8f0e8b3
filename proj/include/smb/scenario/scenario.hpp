#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "smb/broker/broker.hpp"
#include "smb/core/step_config.hpp"
#include "smb/core/wiring.hpp"
#include "smb/netem/profile.hpp"
#include "smb/opf/admm.hpp"
#include "smb/runtime/deployment.hpp"
#include "smb/runtime/drts.hpp"
#include "smb/sync/coordinator.hpp"

namespace smb::scenario {

enum class Experiment { echo_bench, opf_run };

struct Scenario {
  std::string name = "scenario";
  Experiment experiment = Experiment::echo_bench;
  runtime::TransportKind transport = runtime::TransportKind::broker;

  sync::Scheme scheme = sync::Scheme::real_time;
  /// Only "inproc" is supported: the coordinator lives in the runner.
  std::string sync_address = "inproc";
  /// Sim-time echo: task step/lookahead (zero = period / 10) and DRTS step.
  Duration task_step{0};
  std::optional<Duration> drts_sim_step;
  std::optional<std::uint64_t> jitter_seed;
  Duration max_jitter{0};

  StepConfig steps;
  int tasks = 20;
  Duration period = std::chrono::milliseconds(500);
  std::size_t samples = 1000;
  runtime::DrtsConfig drts;
  std::optional<WiringConfig> wiring;

  netem::NetProfile net;
  broker::BrokerConfig broker;

  std::filesystem::path network;
  opf::AdmmConfig admm;

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
};

/// Relative paths resolve against `base_dir`. Throws ConfigInvalid.
Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
Scenario load_scenario(const std::filesystem::path& path);

/// Reseeds the scenario and its net profile.
void apply_seed(Scenario& s, std::uint64_t seed);

struct RunOutcome {
  std::filesystem::path output_dir;
  /// Caption-style one-liner, also written to summary.txt.
  std::string summary;
};

/// Runs the experiment in-process and writes its artifacts. Module errors
/// are rethrown as ExperimentFailed.
RunOutcome run_scenario(const Scenario& s);

/// Side-by-side table of two run directories (B relative to A). Throws
/// IncompatibleRuns.
std::string compare_runs(const std::filesystem::path& a, const std::filesystem::path& b);

}  // namespace smb::scenario
