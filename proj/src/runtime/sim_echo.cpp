#include "smb/runtime/sim_echo.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "smb/core/wiring.hpp"
#include "smb/error.hpp"
#include "smb/runtime/echo.hpp"

namespace smb::runtime {

namespace {

std::string task_name(int i) { return fmt::format("task{:02d}", i); }

}  // namespace

SimEchoResult run_sim_echo(const SimEchoConfig& cfg) {
  if (cfg.tasks < 1 || cfg.tasks > 99) throw Error(ErrorCode::InvalidArgument, "task count must lie in [1, 99]");
  if (cfg.period <= Duration::zero() || cfg.comm_step <= Duration::zero()) {
    throw Error(ErrorCode::InvalidArgument, "period and comm step must be positive");
  }
  const Duration task_step = cfg.task_step > Duration::zero() ? cfg.task_step : cfg.period / 10;
  if (task_step <= Duration::zero()) throw Error(ErrorCode::InvalidArgument, "task step must be positive");

  sync::CoordinatorOptions copts;
  copts.jitter_seed = cfg.jitter_seed;
  copts.max_jitter = cfg.max_jitter;
  sync::Coordinator coordinator(copts);
  sync::SimBus bus(coordinator, echo_wiring(cfg.tasks), cfg.profile);

  std::vector<std::string> drts_in, drts_out;
  for (int i = 1; i <= cfg.tasks; ++i) {
    bus.declare(task_name(i), {task_input(i)}, {task_output(i)}, task_step);
    drts_in.push_back(drts_input(i));
    drts_out.push_back(drts_output(i));
  }
  bus.declare("drts", drts_in, drts_out, cfg.comm_step);
  bus.start();

  std::atomic<int> finished{0};
  std::mutex errors_mutex;
  std::exception_ptr first_error;
  auto fail = [&](sync::SimBus::Port& port) {
    std::lock_guard lock(errors_mutex);
    if (!first_error) first_error = std::current_exception();
    port.resign();
  };

  std::vector<EchoResult> results(static_cast<std::size_t>(cfg.tasks));
  std::vector<std::thread> threads;

  for (int i = 1; i <= cfg.tasks; ++i) {
    threads.emplace_back([&, i] {
      auto port = bus.port(task_name(i));
      try {
        EchoTaskState state(i);
        auto& result = results[static_cast<std::size_t>(i - 1)];
        result.task = i;
        const std::string out = task_output(i);
        const Duration timeout = kEchoTimeoutPeriods * cfg.period;
        Timestamp next_send = Timestamp::sim(0);
        for (;;) {
          Timestamp t = port.now();
          for (const auto& rec : port.drain()) {
            if (auto s = state.observe(rec.value, t)) result.samples.push_back(*s);
          }
          state.expire(t, timeout);
          if (state.sent() < cfg.samples && t >= next_send) {
            double x = state.next(t);
            port.send(SignalRecord{out, x, t, state.sent()});
            next_send = next_send + cfg.period;
          }
          if (state.sent() >= cfg.samples && state.pending() == 0) break;
          port.advance(task_step);
        }
        result.sent = state.sent();
        result.lost = state.lost();
        port.resign();
      } catch (...) {
        fail(port);
      }
      ++finished;
    });
  }

  threads.emplace_back([&] {
    auto port = bus.port("drts");
    try {
      std::map<std::string, int> pair_of;
      for (int p = 1; p <= cfg.tasks; ++p) pair_of[drts_input(p)] = p;
      std::vector<double> latest(static_cast<std::size_t>(cfg.tasks), 0.0);
      std::vector<bool> dirty(static_cast<std::size_t>(cfg.tasks), false);
      std::vector<std::uint64_t> seq(static_cast<std::size_t>(cfg.tasks), 0);
      while (finished.load() < cfg.tasks) {
        for (const auto& rec : port.drain()) {
          auto p = static_cast<std::size_t>(pair_of.at(rec.signal) - 1);
          latest[p] = rec.value;
          dirty[p] = true;
        }
        for (std::size_t p = 0; p < latest.size(); ++p) {
          if (!dirty[p]) continue;
          port.send(SignalRecord{drts_output(static_cast<int>(p + 1)), latest[p], port.now(), ++seq[p]});
          dirty[p] = false;
        }
        port.advance(cfg.comm_step);
      }
      port.resign();
    } catch (...) {
      fail(port);
    }
  });

  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);

  SimEchoResult out;
  for (auto& r : results) {
    out.sent += r.sent;
    out.lost += r.lost;
    for (auto& s : r.samples) out.samples.push_back(s);
  }
  out.trace = bus.trace();
  return out;
}

}  // namespace smb::runtime
