#include "smb/runtime/echo.hpp"

#include <algorithm>
#include <thread>

#include "smb/core/wiring.hpp"

namespace smb::runtime {

double EchoTaskState::next(Timestamp t_out) {
  x_ += 1.0;
  pending_.emplace(x_, t_out);
  ++sent_;
  return x_;
}

std::optional<bench::RttSample> EchoTaskState::observe(double value, Timestamp t_in) {
  auto it = pending_.find(value);
  if (it == pending_.end()) return std::nullopt;
  auto sample = bench::make_sample(id_, value, it->second, t_in);
  pending_.erase(it);
  ++matched_;
  return sample;
}

std::size_t EchoTaskState::expire(Timestamp now, Duration timeout) {
  std::size_t n = 0;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (now - it->second > timeout) {
      it = pending_.erase(it);
      ++n;
    } else {
      ++it;
    }
  }
  lost_ += n;
  return n;
}

std::optional<Timestamp> EchoTaskState::oldest_pending() const {
  // Values grow with send time, so the smallest key is the oldest.
  if (pending_.empty()) return std::nullopt;
  return pending_.begin()->second;
}

EchoResult run_echo_task(int id, Duration period, std::size_t n_samples, Endpoint& endpoint,
                         const ScenarioClock& clock) {
  EchoResult result;
  result.task = id;
  EchoTaskState state(id);
  const std::string out = task_output(id);
  const Duration timeout = kEchoTimeoutPeriods * period;

  Timestamp next_send = clock.wall_now();
  while (state.sent() < n_samples || state.pending() > 0) {
    Timestamp now = clock.wall_now();
    if (state.sent() < n_samples && now >= next_send) {
      Timestamp t_out = clock.wall_now();
      double x = state.next(t_out);
      endpoint.send(SignalRecord{out, x, t_out, state.sent()});
      next_send = next_send + period;
      continue;
    }
    state.expire(now, timeout);
    if (state.sent() >= n_samples && state.pending() == 0) break;

    Duration wait = Duration::max();
    if (state.sent() < n_samples) wait = next_send - now;
    if (auto oldest = state.oldest_pending()) wait = std::min(wait, (*oldest + timeout) - now + Duration(1));
    wait = std::clamp(wait, Duration::zero(), Duration(std::chrono::hours(1)));

    auto rec = endpoint.receive(wait);
    if (!rec) continue;
    Timestamp t_in = clock.wall_now();
    if (auto sample = state.observe(rec->value, t_in)) result.samples.push_back(*sample);
  }
  result.sent = state.sent();
  result.lost = state.lost();
  return result;
}

}  // namespace smb::runtime
