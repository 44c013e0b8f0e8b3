#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "smb/core/clock.hpp"

namespace smb::sync {

enum class Scheme { real_time, sim_time };

/// Snapshot of one component's simulated-time state.
struct ComponentClock {
  std::string id;
  Scheme scheme = Scheme::sim_time;
  Timestamp granted = Timestamp::sim(0);
  Timestamp requested = Timestamp::sim(0);
  std::set<std::string> upstreams;
  Duration lookahead{0};
  bool waiting = false;
  bool resigned = false;
};

struct CoordinatorOptions {
  /// When set, each grant is delayed by a random wall-clock sleep in
  /// [0, max_jitter] drawn from this seed. Grants are unaffected.
  std::optional<std::uint64_t> jitter_seed;
  Duration max_jitter{0};
};

/// Conservative simulated-time coordinator. A component may advance to t
/// only once no upstream can still produce a record due at or before t:
/// for every upstream u, t < (u waiting ? u.requested : u.granted) + u.lookahead.
class Coordinator final : public SimTimeSource {
 public:
  explicit Coordinator(CoordinatorOptions options = {});

  /// Lookahead is the minimum sim delay between a component's current time
  /// and the due time of anything it sends. Throws InvalidArgument.
  void register_component(const std::string& id, std::set<std::string> upstreams,
                          Duration lookahead);

  /// Blocks the caller until `to` is safe, then grants exactly `to`.
  /// Throws UnknownComponent, InvalidArgument (to <= granted) or
  /// DeadlockDetected when every active component waits and none can go.
  Timestamp request_advance(const std::string& id, Timestamp to);

  /// The component will not send anything again.
  void resign(const std::string& id);

  [[nodiscard]] Timestamp granted(const std::string& id) const override;
  [[nodiscard]] ComponentClock clock(const std::string& id) const;
  [[nodiscard]] std::vector<std::string> components() const;

 private:
  [[nodiscard]] bool grantable(const ComponentClock& c, Timestamp to) const;
  [[nodiscard]] bool stuck() const;
  const ComponentClock& find(const std::string& id) const;
  ComponentClock& find(const std::string& id);

  CoordinatorOptions options_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, ComponentClock> clocks_;
  bool deadlocked_ = false;
  std::mt19937_64 jitter_rng_;
};

}  // namespace smb::sync
