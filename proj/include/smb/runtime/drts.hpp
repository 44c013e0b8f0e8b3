#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "smb/core/clock.hpp"
#include "smb/core/endpoint.hpp"

namespace smb::runtime {

struct DrtsConfig {
  Duration model_step = std::chrono::milliseconds(1);
  Duration comm_step = std::chrono::milliseconds(10);
  int n_io_pairs = 20;

  /// Throws InvalidArgument.
  void validate() const;
};

struct DrtsStats {
  std::uint64_t model_steps = 0;
  std::uint64_t comm_flushes = 0;
  std::uint64_t overruns = 0;
  Duration max_lateness{0};
  std::uint64_t received = 0;
  std::uint64_t transmitted = 0;
};

/// A value leaving drts/outNN, with the time its input arrived.
struct MirrorEvent {
  int pair = 0;
  double value = 0.0;
  Timestamp received;
  Timestamp sent;
};

/// Emulated real-time simulator: a paced loop at the model step that mirrors
/// drts/inNN to drts/outNN every communication step. Outputs start at 0.0
/// and hold their last value; only outputs whose input changed are sent.
class Drts {
 public:
  Drts(DrtsConfig cfg, Endpoint& endpoint, const ScenarioClock& clock);
  ~Drts();
  Drts(const Drts&) = delete;
  Drts& operator=(const Drts&) = delete;

  void set_mirror_trace(std::function<void(const MirrorEvent&)> trace);
  void start();
  /// Stops the loop and rethrows anything it failed with (TransportDown).
  DrtsStats stop();

  [[nodiscard]] DrtsStats stats() const;
  [[nodiscard]] double output(int pair) const;
  [[nodiscard]] bool running() const { return running_; }

 private:
  struct Pair {
    double latest = 0.0;
    Timestamp received;
    bool dirty = false;
    std::uint64_t seq = 0;
  };

  void loop();

  DrtsConfig cfg_;
  Endpoint& endpoint_;
  const ScenarioClock& clock_;
  std::function<void(const MirrorEvent&)> trace_;
  mutable std::mutex mutex_;
  std::vector<Pair> pairs_;
  DrtsStats stats_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> running_{false};
  std::exception_ptr error_;
  std::thread thread_;
};

/// Starts a DRTS on the endpoint.
std::unique_ptr<Drts> run_drts(const DrtsConfig& cfg, Endpoint& endpoint, const ScenarioClock& clock);

}  // namespace smb::runtime
