#include <gtest/gtest.h>

#include <atomic>
#include <future>
#include <thread>

#include "smb/error.hpp"
#include "smb/sync/coordinator.hpp"
#include "smb/sync/pacer.hpp"
#include "smb/sync/sim_bus.hpp"

using namespace smb;
using namespace smb::sync;
using namespace std::chrono_literals;

namespace {

Timestamp at(Duration d) { return Timestamp::sim(d); }

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Coordinator, LoneComponentIsGrantedImmediately) {
  Coordinator c;
  c.register_component("a", {}, 10ms);
  EXPECT_EQ(c.request_advance("a", at(100ms)), at(100ms));
  EXPECT_EQ(c.granted("a"), at(100ms));
}

TEST(Coordinator, Errors) {
  Coordinator c;
  c.register_component("a", {}, 10ms);
  EXPECT_EQ(code_of([&] { c.request_advance("ghost", at(1ms)); }), ErrorCode::UnknownComponent);
  c.request_advance("a", at(5ms));
  EXPECT_EQ(code_of([&] { c.request_advance("a", at(5ms)); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { c.request_advance("a", Timestamp::wall(10)); }), ErrorCode::MixedClockDomain);
  EXPECT_EQ(code_of([&] { c.register_component("a", {}, 1ms); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { c.register_component("b", {}, Duration(-1)); }), ErrorCode::InvalidArgument);
}

TEST(Coordinator, ChainBlocksUntilUpstreamAdvances) {
  Coordinator c;
  c.register_component("A", {}, 10ms);
  c.register_component("B", {"A"}, 10ms);
  c.request_advance("A", at(40ms));
  auto b = std::async(std::launch::async, [&] { return c.request_advance("B", at(50ms)); });
  EXPECT_EQ(b.wait_for(100ms), std::future_status::timeout);
  EXPECT_TRUE(c.clock("B").waiting);
  c.request_advance("A", at(50ms));
  ASSERT_EQ(b.wait_for(2s), std::future_status::ready);
  EXPECT_EQ(b.get(), at(50ms));
}

TEST(Coordinator, ResignedUpstreamNoLongerBlocks) {
  Coordinator c;
  c.register_component("A", {}, 10ms);
  c.register_component("B", {"A"}, 10ms);
  auto b = std::async(std::launch::async, [&] { return c.request_advance("B", at(1s)); });
  EXPECT_EQ(b.wait_for(50ms), std::future_status::timeout);
  c.resign("A");
  EXPECT_EQ(b.get(), at(1s));
}

TEST(Coordinator, CycleAdvancesInLockstep) {
  CoordinatorOptions opts;
  opts.jitter_seed = 1;
  opts.max_jitter = 200us;
  Coordinator c(opts);
  c.register_component("A", {"B"}, 10ms);
  c.register_component("B", {"A"}, 10ms);
  std::atomic<int> violations{0};
  auto run = [&](const std::string& self, const std::string& other) {
    std::vector<Timestamp> grants;
    for (int k = 1; k <= 200; ++k) {
      auto t = c.request_advance(self, at(k * 10ms));
      grants.push_back(t);
      // Neither side may run more than one lookahead ahead of the other.
      if (c.granted(other) + 10ms < t) ++violations;
    }
    return grants;
  };
  auto a = std::async(std::launch::async, run, "A", "B");
  auto b = std::async(std::launch::async, run, "B", "A");
  auto ga = a.get();
  auto gb = b.get();
  ASSERT_EQ(ga.size(), 200u);
  for (int k = 0; k < 200; ++k) {
    EXPECT_EQ(ga[k], at((k + 1) * 10ms));
    EXPECT_EQ(gb[k], at((k + 1) * 10ms));
  }
  EXPECT_EQ(violations, 0);
}

TEST(Coordinator, ZeroLookaheadCycleDeadlocks) {
  Coordinator c;
  c.register_component("A", {"B"}, 0ms);
  c.register_component("B", {"A"}, 0ms);
  auto a = std::async(std::launch::async, [&] { return code_of([&] { c.request_advance("A", at(10ms)); }); });
  auto b = std::async(std::launch::async, [&] { return code_of([&] { c.request_advance("B", at(10ms)); }); });
  EXPECT_EQ(a.get(), ErrorCode::DeadlockDetected);
  EXPECT_EQ(b.get(), ErrorCode::DeadlockDetected);
}

TEST(Pacer, IdleHandlerHasNoOverruns) {
  auto r = pace_real_time(10ms, 1s, [](const Tick&) { return true; });
  EXPECT_NEAR(static_cast<double>(r.ticks), 100.0, 1.0);
  EXPECT_EQ(r.overruns, 0u);
}

TEST(Pacer, SlowHandlerOverrunsEveryTick) {
  std::vector<bool> flags;
  pace_real_time(10ms, 300ms, [&](const Tick& t) {
    flags.push_back(t.overrun);
    std::this_thread::sleep_for(15ms);
    return true;
  });
  ASSERT_GT(flags.size(), 5u);
  for (std::size_t i = 1; i < flags.size(); ++i) EXPECT_TRUE(flags[i]) << i;
}

TEST(Pacer, PeriodicTaskTickCount) {
  // Offline-task period scaled 10x down: 50 ms over 1 s.
  auto r = pace_real_time(50ms, 1s, [](const Tick&) { return true; });
  EXPECT_NEAR(static_cast<double>(r.ticks), 20.0, 1.0);
}

TEST(Pacer, HandlerCanStopEarly) {
  auto r = pace_real_time(1ms, 10s, [](const Tick& t) { return t.index < 4; });
  EXPECT_EQ(r.ticks, 5u);
  EXPECT_THROW(RealTimePacer(Duration(50)), Error);
}

TEST(SimBus, RecordBecomesDueAfterLookaheadAndDelay) {
  Coordinator coord;
  WiringConfig w;
  w.links = {{"a/out", "b/in"}};
  netem::NetProfile p;
  p.base_delay = 5ms;
  SimBus bus(coord, w, p);
  bus.declare("a", {}, {"a/out"}, 10ms);
  bus.declare("b", {"b/in"}, {}, 10ms);
  bus.start();
  auto a = bus.port("a");
  auto b = bus.port("b");
  a.send({"a/out", 7.0, Timestamp::sim(0), 1});
  a.resign();
  b.advance_to(at(14ms));
  EXPECT_TRUE(b.drain().empty());
  b.advance_to(at(15ms));
  auto got = b.drain();
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].signal, "b/in");
  EXPECT_EQ(got[0].value, 7.0);
  EXPECT_EQ(got[0].send_ts, at(0ms));
  auto trace = bus.trace();
  ASSERT_EQ(trace.size(), 1u);
  EXPECT_EQ(trace[0].due, at(15ms));
  EXPECT_EQ(code_of([&] { bus.port("ghost"); }), ErrorCode::UnknownComponent);
  EXPECT_EQ(code_of([&] { a.send({"b/in", 1.0, Timestamp::sim(0), 2}); }), ErrorCode::UnknownSignal);
}

TEST(SimBus, JitteredLinkKeepsFifo) {
  Coordinator coord;
  WiringConfig w;
  w.links = {{"a/out", "b/in"}};
  auto p = netem::preset("3g", 4);
  SimBus bus(coord, w, p);
  bus.declare("a", {}, {"a/out"}, 1ms);
  bus.declare("b", {"b/in"}, {}, 1ms);
  bus.start();
  auto a = bus.port("a");
  auto b = bus.port("b");
  auto producer = std::async(std::launch::async, [&] {
    for (std::uint64_t s = 1; s <= 500; ++s) {
      a.send({"a/out", double(s), Timestamp::sim(0), s});
      a.advance(1ms);
    }
    a.resign();
  });
  std::vector<std::uint64_t> seqs;
  while (seqs.size() < 500) {
    b.advance(5ms);
    for (const auto& r : b.drain()) {
      EXPECT_LE(r.send_ts, b.now());
      seqs.push_back(r.seq);
    }
    ASSERT_LT(b.now(), at(10s));
  }
  producer.get();
  for (std::size_t i = 0; i < seqs.size(); ++i) EXPECT_EQ(seqs[i], i + 1);
}
