#include "smb/sync/pacer.hpp"

#include <thread>

#include "smb/error.hpp"

namespace smb::sync {

using namespace std::chrono_literals;

RealTimePacer::RealTimePacer(Duration step, Clock::time_point start) : step_(step), start_(start) {
  if (step_ < 100ns) throw Error(ErrorCode::InvalidArgument, "pacing step below 100 ns");
}

Tick RealTimePacer::next() {
  Tick t;
  t.index = index_++;
  auto deadline = start_ + step_ * static_cast<Duration::rep>(t.index);
  auto entered = Clock::now();
  bool missed = t.index > 0 && entered > deadline;

  if (step_ >= 1ms) {
    std::this_thread::sleep_until(deadline);
  } else {
    // Sub-millisecond steps: coarse sleep, then spin the last stretch.
    constexpr auto spin_window = 200us;
    if (deadline - entered > spin_window) std::this_thread::sleep_until(deadline - spin_window);
    while (Clock::now() < deadline) {
      if (deadline - Clock::now() > 20us) std::this_thread::yield();
    }
  }

  auto woke = Clock::now();
  t.scheduled = std::chrono::duration_cast<Duration>(deadline - start_);
  t.actual = std::chrono::duration_cast<Duration>(woke - start_);
  t.lateness = t.actual - t.scheduled;
  t.overrun = missed || t.lateness > step_;
  if (t.overrun) ++overruns_;
  if (t.lateness > max_lateness_) max_lateness_ = t.lateness;
  return t;
}

PaceReport pace_real_time(Duration step, Duration duration,
                          const std::function<bool(const Tick&)>& handler) {
  RealTimePacer pacer(step);
  PaceReport report;
  for (;;) {
    Tick t = pacer.next();
    if (t.scheduled >= duration) break;
    ++report.ticks;
    if (t.overrun) ++report.overruns;
    if (t.lateness > report.max_lateness) report.max_lateness = t.lateness;
    if (!handler(t)) break;
  }
  return report;
}

}  // namespace smb::sync
