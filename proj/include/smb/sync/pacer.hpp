#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

#include "smb/core/time.hpp"

namespace smb::sync {

struct Tick {
  std::uint64_t index = 0;
  /// Offsets from the pacer's start.
  Duration scheduled{0};
  Duration actual{0};
  Duration lateness{0};
  /// The previous tick's work ran past this tick's deadline, or the wake-up
  /// came more than one step late.
  bool overrun = false;
};

/// Wall-clock pacing at fixed multiples of a step.
class RealTimePacer {
 public:
  using Clock = std::chrono::steady_clock;

  /// Throws InvalidArgument for steps below 100 ns.
  explicit RealTimePacer(Duration step, Clock::time_point start = Clock::now());

  /// Waits for the next tick (tick 0 is the start instant).
  Tick next();

  [[nodiscard]] Duration step() const { return step_; }
  [[nodiscard]] std::uint64_t ticks() const { return index_; }
  [[nodiscard]] std::uint64_t overruns() const { return overruns_; }
  [[nodiscard]] Duration max_lateness() const { return max_lateness_; }

 private:
  Duration step_;
  Clock::time_point start_;
  std::uint64_t index_ = 0;
  std::uint64_t overruns_ = 0;
  Duration max_lateness_{0};
};

struct PaceReport {
  std::uint64_t ticks = 0;
  std::uint64_t overruns = 0;
  Duration max_lateness{0};
};

/// Runs `handler` on every tick until `duration` has elapsed or the handler
/// returns false.
PaceReport pace_real_time(Duration step, Duration duration,
                          const std::function<bool(const Tick&)>& handler);

}  // namespace smb::sync
