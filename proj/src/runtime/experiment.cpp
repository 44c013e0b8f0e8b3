#include "smb/runtime/experiment.hpp"

#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "smb/error.hpp"
#include "smb/runtime/echo.hpp"

namespace smb::runtime {

std::vector<ComponentSpec> echo_components(int tasks) {
  std::vector<ComponentSpec> out;
  ComponentSpec drts{"drts", {}, {}};
  for (int i = 1; i <= tasks; ++i) {
    out.push_back({fmt::format("task{:02d}", i), {task_input(i)}, {task_output(i)}});
    drts.inputs.push_back(drts_input(i));
    drts.outputs.push_back(drts_output(i));
  }
  out.push_back(std::move(drts));
  return out;
}

EchoExperimentResult run_echo_experiment(const EchoExperimentConfig& cfg) {
  if (cfg.tasks < 1 || cfg.tasks > cfg.drts.n_io_pairs) {
    throw Error(ErrorCode::InvalidArgument, "task count must lie in [1, DRTS io pairs]");
  }
  if (cfg.period <= Duration::zero()) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  cfg.drts.validate();

  auto components = echo_components(cfg.tasks);
  WiringConfig wiring = cfg.wiring.value_or(echo_wiring(cfg.tasks));
  if (cfg.drts.n_io_pairs > cfg.tasks) {
    // Unused pairs are still part of the DRTS model but are not wired.
    auto& drts = components.back();
    for (int i = cfg.tasks + 1; i <= cfg.drts.n_io_pairs; ++i) {
      drts.inputs.push_back(drts_input(i));
      drts.outputs.push_back(drts_output(i));
    }
    wiring.mode = WiringMode::permissive;
  }
  Deployment deployment(wiring, components, cfg.deployment);

  ScenarioClock clock;
  std::unique_ptr<Drts> drts;
  if (cfg.drts_enabled) drts = run_drts(cfg.drts, deployment.endpoint("drts"), clock);

  std::vector<EchoResult> results(static_cast<std::size_t>(cfg.tasks));
  std::mutex errors_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> threads;
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 1; i <= cfg.tasks; ++i) {
    threads.emplace_back([&, i] {
      try {
        auto& ep = deployment.endpoint(fmt::format("task{:02d}", i));
        results[static_cast<std::size_t>(i - 1)] = run_echo_task(i, cfg.period, cfg.samples, ep, clock);
      } catch (...) {
        std::lock_guard lock(errors_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  auto t1 = std::chrono::steady_clock::now();

  EchoExperimentResult out;
  if (drts) out.drts = drts->stop();
  deployment.close();
  if (first_error) std::rethrow_exception(first_error);

  for (auto& r : results) {
    out.sent += r.sent;
    out.lost += r.lost;
    out.samples.insert(out.samples.end(), r.samples.begin(), r.samples.end());
  }
  out.wall_time = std::chrono::duration_cast<Duration>(t1 - t0);
  return out;
}

}  // namespace smb::runtime
