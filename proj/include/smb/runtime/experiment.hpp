#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "smb/bench/stats.hpp"
#include "smb/runtime/deployment.hpp"
#include "smb/runtime/drts.hpp"

namespace smb::runtime {

struct EchoExperimentConfig {
  int tasks = 20;
  Duration period = std::chrono::milliseconds(500);
  std::size_t samples = 1000;
  DrtsConfig drts;
  DeploymentOptions deployment;
  /// Replaces the default one-to-one echo wiring.
  std::optional<WiringConfig> wiring;
  /// Run without a DRTS (every sample is lost).
  bool drts_enabled = true;
};

struct EchoExperimentResult {
  std::vector<bench::RttSample> samples;
  std::size_t sent = 0;
  std::size_t lost = 0;
  DrtsStats drts;
  Duration wall_time{0};
};

/// The echo benchmark in real time: N echo tasks and one DRTS, each on its
/// own thread, connected by the chosen transport. Samples are ordered by
/// task, then by value.
EchoExperimentResult run_echo_experiment(const EchoExperimentConfig& cfg);

std::vector<ComponentSpec> echo_components(int tasks);

}  // namespace smb::runtime
