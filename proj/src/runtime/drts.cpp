#include "smb/runtime/drts.hpp"

#include <map>

#include <fmt/format.h>

#include "smb/core/wiring.hpp"
#include "smb/error.hpp"
#include "smb/sync/pacer.hpp"

namespace smb::runtime {

void DrtsConfig::validate() const {
  if (model_step < std::chrono::nanoseconds(100) || model_step > std::chrono::milliseconds(1)) {
    throw Error(ErrorCode::InvalidArgument, "model step must lie in [100 ns, 1 ms]");
  }
  if (comm_step < model_step) throw Error(ErrorCode::InvalidArgument, "comm step shorter than model step");
  if (n_io_pairs < 1 || n_io_pairs > 99) throw Error(ErrorCode::InvalidArgument, "io pairs must lie in [1, 99]");
}

Drts::Drts(DrtsConfig cfg, Endpoint& endpoint, const ScenarioClock& clock)
    : cfg_(cfg), endpoint_(endpoint), clock_(clock) {
  cfg_.validate();
  pairs_.resize(static_cast<std::size_t>(cfg_.n_io_pairs));
}

Drts::~Drts() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
}

void Drts::set_mirror_trace(std::function<void(const MirrorEvent&)> trace) { trace_ = std::move(trace); }

void Drts::start() {
  if (thread_.joinable()) return;
  running_ = true;
  thread_ = std::thread([this] { loop(); });
}

DrtsStats Drts::stop() {
  stop_ = true;
  if (thread_.joinable()) thread_.join();
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
  return stats();
}

DrtsStats Drts::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

double Drts::output(int pair) const {
  std::lock_guard lock(mutex_);
  if (pair < 1 || pair > cfg_.n_io_pairs) throw Error(ErrorCode::UnknownSignal, fmt::format("no pair {}", pair));
  return pairs_[static_cast<std::size_t>(pair - 1)].latest;
}

void Drts::loop() {
  std::map<std::string, int> pair_of;
  for (int p = 1; p <= cfg_.n_io_pairs; ++p) pair_of[drts_input(p)] = p;
  const auto flush_every = static_cast<std::uint64_t>(cfg_.comm_step / cfg_.model_step);

  try {
    sync::RealTimePacer pacer(cfg_.model_step, clock_.to_steady(clock_.wall_now()));
    while (!stop_) {
      auto tick = pacer.next();
      std::lock_guard lock(mutex_);
      while (auto rec = endpoint_.receive(Duration::zero())) {
        auto it = pair_of.find(rec->signal);
        if (it == pair_of.end()) continue;
        auto& p = pairs_[static_cast<std::size_t>(it->second - 1)];
        p.latest = rec->value;
        p.received = clock_.wall_now();
        p.dirty = true;
        ++stats_.received;
      }
      ++stats_.model_steps;
      if (tick.index % flush_every == 0) {
        ++stats_.comm_flushes;
        for (int i = 1; i <= cfg_.n_io_pairs; ++i) {
          auto& p = pairs_[static_cast<std::size_t>(i - 1)];
          if (!p.dirty) continue;
          Timestamp now = clock_.wall_now();
          endpoint_.send(SignalRecord{drts_output(i), p.latest, now, ++p.seq});
          p.dirty = false;
          ++stats_.transmitted;
          if (trace_) trace_(MirrorEvent{i, p.latest, p.received, now});
        }
      }
      stats_.overruns = pacer.overruns();
      stats_.max_lateness = pacer.max_lateness();
    }
  } catch (...) {
    error_ = std::current_exception();
  }
  running_ = false;
}

std::unique_ptr<Drts> run_drts(const DrtsConfig& cfg, Endpoint& endpoint, const ScenarioClock& clock) {
  auto drts = std::make_unique<Drts>(cfg, endpoint, clock);
  drts->start();
  return drts;
}

}  // namespace smb::runtime
