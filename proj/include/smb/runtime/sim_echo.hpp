#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "smb/bench/stats.hpp"
#include "smb/netem/profile.hpp"
#include "smb/sync/sim_bus.hpp"

namespace smb::runtime {

struct SimEchoConfig {
  int tasks = 20;
  Duration period = std::chrono::milliseconds(500);
  std::size_t samples = 1000;
  /// Task polling step and lookahead; zero means period / 10.
  Duration task_step{0};
  /// DRTS step and lookahead.
  Duration comm_step = std::chrono::milliseconds(10);
  netem::NetProfile profile;
  /// Scheduler perturbation: random wall-clock pauses before grants.
  std::optional<std::uint64_t> jitter_seed;
  Duration max_jitter{0};
};

struct SimEchoResult {
  /// Ordered by task, then by value.
  std::vector<bench::RttSample> samples;
  std::size_t sent = 0;
  std::size_t lost = 0;
  std::vector<sync::SimTraceEntry> trace;
};

/// The echo experiment in simulated time: every task and the DRTS advance
/// under the conservative coordinator and exchange records over a SimBus.
/// RTTs are simulated durations, independent of thread scheduling.
SimEchoResult run_sim_echo(const SimEchoConfig& cfg);

}  // namespace smb::runtime
