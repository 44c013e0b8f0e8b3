#include "smb/sync/coordinator.hpp"

#include <thread>

#include "smb/error.hpp"

namespace smb::sync {

Coordinator::Coordinator(CoordinatorOptions options)
    : options_(options), jitter_rng_(options.jitter_seed.value_or(0)) {}

void Coordinator::register_component(const std::string& id, std::set<std::string> upstreams,
                                     Duration lookahead) {
  if (lookahead < Duration::zero()) {
    throw Error(ErrorCode::InvalidArgument, "negative lookahead for '" + id + "'");
  }
  std::lock_guard lock(mutex_);
  ComponentClock c;
  c.id = id;
  c.upstreams = std::move(upstreams);
  c.lookahead = lookahead;
  if (!clocks_.emplace(id, std::move(c)).second) {
    throw Error(ErrorCode::InvalidArgument, "component '" + id + "' registered twice");
  }
  cv_.notify_all();
}

const ComponentClock& Coordinator::find(const std::string& id) const {
  auto it = clocks_.find(id);
  if (it == clocks_.end()) throw Error(ErrorCode::UnknownComponent, "'" + id + "' is not registered");
  return it->second;
}

ComponentClock& Coordinator::find(const std::string& id) {
  auto it = clocks_.find(id);
  if (it == clocks_.end()) throw Error(ErrorCode::UnknownComponent, "'" + id + "' is not registered");
  return it->second;
}

bool Coordinator::grantable(const ComponentClock& c, Timestamp to) const {
  for (const auto& up_id : c.upstreams) {
    const auto& up = find(up_id);
    if (up.resigned) continue;
    Timestamp bound = (up.waiting ? up.requested : up.granted) + up.lookahead;
    if (!(to < bound)) return false;
  }
  return true;
}

bool Coordinator::stuck() const {
  for (const auto& [id, c] : clocks_) {
    if (c.resigned) continue;
    if (!c.waiting) return false;
    if (grantable(c, c.requested)) return false;
  }
  return true;
}

Timestamp Coordinator::request_advance(const std::string& id, Timestamp to) {
  std::unique_lock lock(mutex_);
  auto& self = find(id);
  if (to.clock() != ClockDomain::sim) {
    throw Error(ErrorCode::MixedClockDomain, "advance requests are in simulated time");
  }
  if (!(self.granted < to)) {
    throw Error(ErrorCode::InvalidArgument, "'" + id + "' must request beyond its granted time");
  }
  for (const auto& up : self.upstreams) (void)find(up);

  self.requested = to;
  self.waiting = true;
  cv_.notify_all();
  for (;;) {
    if (deadlocked_) {
      self.waiting = false;
      throw Error(ErrorCode::DeadlockDetected, "no component can advance (zero-lookahead cycle?)");
    }
    if (grantable(self, to)) break;
    if (stuck()) {
      deadlocked_ = true;
      cv_.notify_all();
      continue;
    }
    cv_.wait(lock);
  }

  Duration pause{0};
  if (options_.jitter_seed && options_.max_jitter > Duration::zero()) {
    pause = Duration(std::uniform_int_distribution<Duration::rep>(0, options_.max_jitter.count())(jitter_rng_));
  }
  if (pause > Duration::zero()) {
    lock.unlock();
    std::this_thread::sleep_for(pause);
    lock.lock();
  }
  auto& me = find(id);
  me.granted = to;
  me.waiting = false;
  cv_.notify_all();
  return to;
}

void Coordinator::resign(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto& c = find(id);
  c.resigned = true;
  c.waiting = false;
  cv_.notify_all();
}

Timestamp Coordinator::granted(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return find(id).granted;
}

ComponentClock Coordinator::clock(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return find(id);
}

std::vector<std::string> Coordinator::components() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, c] : clocks_) ids.push_back(id);
  return ids;
}

}  // namespace smb::sync
