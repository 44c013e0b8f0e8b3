#pragma once

#include <chrono>
#include <string>

#include "smb/core/time.hpp"

namespace smb {

/// Anything that can report the simulated time granted to a component.
class SimTimeSource {
 public:
  virtual ~SimTimeSource() = default;
  [[nodiscard]] virtual Timestamp granted(const std::string& component) const = 0;
};

/// Scenario-relative clock. Wall time counts from construction on the
/// steady clock; sim time is read from an attached coordinator.
class ScenarioClock {
 public:
  using Steady = std::chrono::steady_clock;

  ScenarioClock() : start_(Steady::now()) {}
  explicit ScenarioClock(Steady::time_point start) : start_(start) {}

  /// Throws NoCoordinator for the sim domain when nothing is attached.
  [[nodiscard]] Timestamp now(ClockDomain domain) const;
  [[nodiscard]] Timestamp wall_now() const { return now(ClockDomain::wall); }

  void attach(const SimTimeSource& source, std::string component) {
    source_ = &source;
    component_ = std::move(component);
  }
  void detach() { source_ = nullptr; }

  [[nodiscard]] Steady::time_point start() const { return start_; }
  [[nodiscard]] Steady::time_point to_steady(Timestamp wall) const {
    return start_ + wall.since_start();
  }

 private:
  Steady::time_point start_;
  const SimTimeSource* source_ = nullptr;
  std::string component_;
};

}  // namespace smb
