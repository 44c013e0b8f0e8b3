#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <thread>

#include "smb/error.hpp"
#include "smb/p2p/client.hpp"
#include "smb/p2p/directory.hpp"
#include "smb/p2p/endpoint.hpp"
#include "smb/p2p/server.hpp"

using namespace smb;
using namespace smb::p2p;
using namespace std::chrono_literals;

namespace {

SignalRecord rec(std::string topic, double value, std::uint64_t seq) {
  return {std::move(topic), value, Timestamp::wall(seq * 10), seq};
}

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

const wire::HostPort kAny{"127.0.0.1", 0};

}  // namespace

TEST(PeerServer, EmptyCellBeforeFirstWrite) {
  auto s = PeerServer::serve({"drts/out07"}, kAny);
  EXPECT_FALSE(s->read_local("drts/out07").latest);
  EXPECT_EQ(code_of([&] { (void)s->read_local("ghost"); }), ErrorCode::UnknownSignal);
}

TEST(PeerServer, MonotoneSeqRule) {
  auto s = PeerServer::serve({"a/x"}, kAny);
  EXPECT_TRUE(s->write_local(rec("a/x", 6.0, 6)));
  EXPECT_FALSE(s->write_local(rec("a/x", 5.0, 5)));
  EXPECT_FALSE(s->write_local(rec("a/x", 6.5, 6)));
  EXPECT_EQ(s->read_local("a/x").latest->seq, 6u);
  EXPECT_EQ(s->read_local("a/x").latest->value, 6.0);
}

TEST(PeerServer, ReadYourWrites) {
  auto s = PeerServer::serve({"own/x"}, kAny);
  for (std::uint64_t i = 1; i <= 100; ++i) {
    s->write_local(rec("own/x", double(i), i));
    ASSERT_EQ(s->read_local("own/x").latest->value, double(i));
  }
}

TEST(PeerServer, AddressInUse) {
  auto s = PeerServer::serve({"a/x"}, kAny);
  EXPECT_EQ(code_of([&] { PeerServer::serve({"b/x"}, s->address()); }), ErrorCode::AddressInUse);
}

TEST(PeerClient, GetSetAgainstOwner) {
  auto owner = PeerServer::serve({"drts/out07"}, kAny);
  PeerDirectory dir;
  dir.add("drts/out07", owner->address());
  PeerClient client(dir);
  EXPECT_EQ(code_of([&] { client.get_signal("drts/out07"); }), ErrorCode::Empty);
  owner->write_local(rec("drts/out07", 42.0, 3));
  auto got = client.get_signal("drts/out07");
  EXPECT_EQ(got.value, 42.0);
  EXPECT_EQ(got.seq, 3u);
  EXPECT_EQ(got.send_ts, Timestamp::wall(30));
  EXPECT_EQ(code_of([&] { client.get_signal("ghost"); }), ErrorCode::UnknownSignal);

  EXPECT_TRUE(client.set_signal(rec("drts/out07", 1.0, 4)).applied);
  EXPECT_TRUE(client.set_signal(rec("drts/out07", 2.0, 5)).applied);
  EXPECT_FALSE(client.set_signal(rec("drts/out07", 9.0, 4)).applied);
  EXPECT_EQ(owner->read_local("drts/out07").latest->value, 2.0);
}

TEST(PeerClient, OutOfOrderWritersKeepHighestSeq) {
  auto owner = PeerServer::serve({"x/y"}, kAny);
  PeerDirectory dir;
  dir.add("x/y", owner->address());
  PeerClientOptions slow_opts;
  slow_opts.profile.base_delay = 50ms;
  PeerClient slow(dir, slow_opts);
  PeerClient fast(dir);
  auto late = slow.set_signal_async(rec("x/y", 5.0, 5));
  EXPECT_TRUE(fast.set_signal(rec("x/y", 6.0, 6)).applied);
  EXPECT_FALSE(late.get().applied);
  EXPECT_EQ(owner->read_local("x/y").latest->seq, 6u);
}

TEST(PeerClient, UnreachableOwner) {
  wire::HostPort dead;
  {
    auto s = PeerServer::serve({"x/y"}, kAny);
    dead = s->address();
    s->shutdown();
  }
  PeerDirectory dir;
  dir.add("x/y", dead);
  PeerClient client(dir);
  EXPECT_EQ(code_of([&] { client.get_signal("x/y"); }), ErrorCode::PeerUnreachable);
  EXPECT_EQ(code_of([&] { client.set_signal(rec("x/y", 1.0, 1)); }), ErrorCode::PeerUnreachable);
}

TEST(PeerClient, GetCrossesTwoShapedLegs) {
  PeerServerOptions sopts;
  sopts.profile.base_delay = 3ms;
  auto owner = PeerServer::serve({"x/y"}, kAny, sopts);
  owner->write_local(rec("x/y", 1.0, 1));
  PeerDirectory dir;
  dir.add("x/y", owner->address());
  PeerClientOptions copts;
  copts.profile.base_delay = 3ms;
  PeerClient client(dir, copts);
  client.get_signal("x/y");  // connect outside the measurement
  double total = 0.0;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    auto t0 = std::chrono::steady_clock::now();
    client.get_signal("x/y");
    total += to_ms(std::chrono::steady_clock::now() - t0);
  }
  EXPECT_GE(total / n, 6.0);
  EXPECT_LT(total / n, 7.5);
}

TEST(PeerDirectory, JsonAndDuplicates) {
  PeerDirectory dir;
  dir.add("a/x", {"127.0.0.1", 7001});
  EXPECT_EQ(code_of([&] { dir.add("a/x", {"127.0.0.1", 7002}); }), ErrorCode::InvalidArgument);
  auto back = PeerDirectory::from_json(dir.to_json());
  EXPECT_EQ(back.owner("a/x"), (wire::HostPort{"127.0.0.1", 7001}));
  EXPECT_EQ(code_of([&] { (void)back.owner("b"); }), ErrorCode::UnknownSignal);
  EXPECT_EQ(dir.to_json().dump(), R"({"a/x":"127.0.0.1:7001"})");
}

TEST(PeerEndpoint, PushesToWiredInputOwner) {
  auto wiring = echo_wiring(1);
  auto task_srv = PeerServer::serve({task_input(1), task_output(1)}, kAny, {"task01"});
  auto drts_srv = PeerServer::serve({drts_input(1), drts_output(1)}, kAny, {"drts"});
  PeerDirectory dir;
  dir.add(task_input(1), task_srv->address());
  dir.add(task_output(1), task_srv->address());
  dir.add(drts_input(1), drts_srv->address());
  dir.add(drts_output(1), drts_srv->address());
  PeerEndpoint task(std::move(task_srv), dir, wiring, {task_input(1)}, {task_output(1)}, {});
  PeerEndpoint drts(std::move(drts_srv), dir, wiring, {drts_input(1)}, {drts_output(1)}, {});
  task.send(rec(task_output(1), 7.0, 1));
  auto at_drts = drts.receive(2s);
  ASSERT_TRUE(at_drts);
  EXPECT_EQ(at_drts->signal, drts_input(1));
  EXPECT_EQ(at_drts->value, 7.0);
  EXPECT_EQ(task.server().read_local(task_output(1)).latest->value, 7.0);
  drts.send(rec(drts_output(1), 7.0, 1));
  auto back = task.receive(2s);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->signal, task_input(1));
  EXPECT_FALSE(task.receive(20ms));
}
