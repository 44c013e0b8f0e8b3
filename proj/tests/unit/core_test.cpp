#include <gtest/gtest.h>

#include <thread>

#include <nlohmann/json.hpp>

#include "smb/core/clock.hpp"
#include "smb/core/signal.hpp"
#include "smb/core/step_config.hpp"
#include "smb/core/wiring.hpp"
#include "smb/error.hpp"
#include "smb/sync/coordinator.hpp"

using namespace smb;
using namespace std::chrono_literals;

namespace {

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

TEST(SignalName, AcceptsAllowedCharacters) {
  EXPECT_TRUE(is_valid_signal_name("task01/out"));
  EXPECT_TRUE(is_valid_signal_name("a.b-c_D/9"));
  EXPECT_FALSE(is_valid_signal_name(""));
  EXPECT_FALSE(is_valid_signal_name("has space"));
  EXPECT_FALSE(is_valid_signal_name("star*"));
  EXPECT_EQ(code_of([] { SignalId("bad name", Direction::input); }), ErrorCode::InvalidArgument);
}

TEST(Timestamp, OrdersWithinOneDomain) {
  auto a = Timestamp::wall(10);
  auto b = Timestamp::wall(20);
  EXPECT_LT(a, b);
  EXPECT_EQ(b - a, Duration(10));
  EXPECT_EQ(a - b, Duration(-10));
  EXPECT_EQ(a + Duration(10), b);
}

TEST(Timestamp, MixedDomainsAlwaysThrow) {
  auto w = Timestamp::wall(5);
  auto s = Timestamp::sim(5);
  EXPECT_EQ(code_of([&] { (void)(w < s); }), ErrorCode::MixedClockDomain);
  EXPECT_EQ(code_of([&] { (void)(w == s); }), ErrorCode::MixedClockDomain);
  EXPECT_EQ(code_of([&] { (void)(w - s); }), ErrorCode::MixedClockDomain);
}

TEST(StepConfig, DefaultsAreValid) { EXPECT_NO_THROW(StepConfig{}.validate()); }

TEST(StepConfig, RejectsBrokenOrdering) {
  StepConfig c;
  c.bus_min_step = 600ms;  // above offline_step
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = {};
  c.drts_step = 2ms;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c = {};
  c.comm_step = 0ms;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(Wiring, FullEchoLoopOfFortyLinksIsValid) {
  auto w = echo_wiring(20);
  EXPECT_EQ(w.links.size(), 40u);
  EXPECT_NO_THROW(validate_wiring(w, echo_signals(20)));
  EXPECT_EQ(w.downstream_of(task_output(3)), std::vector<std::string>{drts_input(3)});
  EXPECT_EQ(w.upstream_of(task_input(3)), drts_output(3));
  EXPECT_EQ(w.upstream_of("nowhere"), "");
}

TEST(Wiring, EmptyLinkListIsValid) {
  EXPECT_NO_THROW(validate_wiring(WiringConfig{}, echo_signals(2)));
}

TEST(Wiring, Errors) {
  auto known = echo_signals(2);
  WiringConfig w;
  w.links = {{"ghost", drts_input(1)}};
  EXPECT_EQ(code_of([&] { validate_wiring(w, known); }), ErrorCode::UnknownSignal);
  w.links = {{drts_input(1), task_input(1)}};
  EXPECT_EQ(code_of([&] { validate_wiring(w, known); }), ErrorCode::DirectionMismatch);
  w = echo_wiring(2);
  w.links.push_back({task_output(2), drts_input(1)});
  EXPECT_EQ(code_of([&] { validate_wiring(w, known); }), ErrorCode::DuplicateInputDriver);
  w.mode = WiringMode::permissive;
  EXPECT_NO_THROW(validate_wiring(w, known));
  w = echo_wiring(2);
  w.links.pop_back();
  EXPECT_EQ(code_of([&] { validate_wiring(w, known); }), ErrorCode::UndrivenInput);
}

TEST(Wiring, JsonRoundTrip) {
  auto w = echo_wiring(3);
  w.mode = WiringMode::permissive;
  auto back = wiring_from_json(wiring_to_json(w));
  EXPECT_EQ(back.links, w.links);
  EXPECT_EQ(back.mode, WiringMode::permissive);
  EXPECT_EQ(code_of([] { wiring_from_json(nlohmann::json::object()); }), ErrorCode::ConfigInvalid);
}

TEST(ScenarioClock, WallIsMonotone) {
  ScenarioClock clock;
  auto t1 = clock.wall_now();
  auto t2 = clock.wall_now();
  EXPECT_GE(t2, t1);
}

TEST(ScenarioClock, SimWithoutCoordinatorThrows) {
  ScenarioClock clock;
  EXPECT_EQ(code_of([&] { (void)clock.now(ClockDomain::sim); }), ErrorCode::NoCoordinator);
}

TEST(ScenarioClock, SimReadsGrantExactly) {
  sync::CoordinatorOptions opts;
  opts.jitter_seed = 3;
  opts.max_jitter = 2ms;
  sync::Coordinator coord(opts);
  coord.register_component("a", {}, 10ms);
  ScenarioClock clock;
  clock.attach(coord, "a");
  EXPECT_EQ(clock.now(ClockDomain::sim), Timestamp::sim(0));
  coord.request_advance("a", Timestamp::sim(Duration(500ms)));
  std::this_thread::sleep_for(3ms);
  EXPECT_EQ(clock.now(ClockDomain::sim), Timestamp::sim(Duration(500ms)));
}
