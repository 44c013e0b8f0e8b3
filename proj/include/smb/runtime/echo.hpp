#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "smb/bench/stats.hpp"
#include "smb/core/clock.hpp"
#include "smb/core/endpoint.hpp"

namespace smb::runtime {

/// Book-keeping of one echo task: the counter it publishes and the send
/// times of values that have not come back yet.
class EchoTaskState {
 public:
  explicit EchoTaskState(int id) : id_(id) {}

  /// Increments the counter, remembers t_out for it and returns the new value.
  double next(Timestamp t_out);

  /// Matches a value seen on the input. Only the first sighting of a pending
  /// value yields a sample; anything else is ignored.
  std::optional<bench::RttSample> observe(double value, Timestamp t_in);

  /// Drops pending values sent more than `timeout` before `now`.
  std::size_t expire(Timestamp now, Duration timeout);

  /// Send time of the oldest pending value.
  [[nodiscard]] std::optional<Timestamp> oldest_pending() const;

  [[nodiscard]] int id() const { return id_; }
  [[nodiscard]] double value() const { return x_; }
  [[nodiscard]] std::size_t sent() const { return sent_; }
  [[nodiscard]] std::size_t matched() const { return matched_; }
  [[nodiscard]] std::size_t lost() const { return lost_; }
  [[nodiscard]] std::size_t pending() const { return pending_.size(); }

 private:
  int id_;
  double x_ = 0.0;
  std::map<double, Timestamp> pending_;
  std::size_t sent_ = 0;
  std::size_t matched_ = 0;
  std::size_t lost_ = 0;
};

struct EchoResult {
  int task = 0;
  std::vector<bench::RttSample> samples;
  std::size_t sent = 0;
  std::size_t lost = 0;
};

/// Timeout per outstanding sample, in periods.
inline constexpr int kEchoTimeoutPeriods = 10;

/// Publishes `n_samples` increasing values on taskNN/out, one per period, and
/// times their return on taskNN/in. Unanswered values count as lost after
/// ten periods. Throws TransportDown if the endpoint fails.
EchoResult run_echo_task(int id, Duration period, std::size_t n_samples, Endpoint& endpoint,
                         const ScenarioClock& clock);

}  // namespace smb::runtime
