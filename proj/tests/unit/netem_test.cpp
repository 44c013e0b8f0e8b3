#include <gtest/gtest.h>

#include <atomic>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "smb/error.hpp"
#include "smb/netem/profile.hpp"
#include "smb/netem/shaped_link.hpp"

using namespace smb;
using namespace smb::netem;
using namespace std::chrono_literals;

TEST(Preset, Values) {
  EXPECT_TRUE(preset("none").is_passthrough());
  auto lan = preset("lan");
  EXPECT_EQ(lan.base_delay, 300us);
  EXPECT_LT(preset("lan").mean_delay(), preset("4g").mean_delay());
  EXPECT_LT(preset("4g").mean_delay(), preset("3g").mean_delay());
  try {
    preset("bogus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownPreset);
  }
}

TEST(Profile, ValidateRejectsBadValues) {
  NetProfile p;
  p.loss_prob = 1.0;
  EXPECT_THROW(p.validate(), Error);
  p.loss_prob = 0.0;
  p.base_delay = Duration(-1);
  EXPECT_THROW(p.validate(), Error);
}

TEST(Profile, ScaledMultipliesDurations) {
  auto p = preset("3g").scaled(0.1);
  EXPECT_EQ(p.base_delay, 6500us);
  EXPECT_EQ(p.jitter.sigma, 1500us);
  EXPECT_EQ(p.jitter.bound, 2500us);
}

TEST(Profile, JsonForms) {
  auto p = profile_from_json({{"profile", "4g"}, {"seed", 9}});
  EXPECT_EQ(p.name, "4g");
  EXPECT_EQ(p.seed, 9u);
  auto inline_p = profile_from_json(
      {{"base_delay_ms", 10}, {"jitter", {{"kind", "uniform"}, {"bound_ms", 2}}}, {"loss_prob", 0.1}});
  EXPECT_EQ(inline_p.base_delay, 10ms);
  EXPECT_EQ(inline_p.jitter.kind, JitterKind::uniform);
  auto back = profile_from_json(profile_to_json(inline_p));
  EXPECT_EQ(back.base_delay, inline_p.base_delay);
  EXPECT_EQ(back.jitter.bound, inline_p.jitter.bound);
  EXPECT_DOUBLE_EQ(back.loss_prob, 0.1);
  EXPECT_THROW(profile_from_json({{"jitter", {{"kind", "cauchy"}}}}), Error);
}

TEST(DelaySampler, NoneIsAlwaysZero) {
  DelaySampler s(preset("none"), "a");
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(s.sample(), Duration::zero());
}

TEST(DelaySampler, DegenerateUniformIsConstant) {
  NetProfile p;
  p.base_delay = 5ms;
  p.jitter = {JitterKind::uniform, 0ms, 0ms};
  DelaySampler s(p, "a");
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(s.sample(), 5ms);
}

TEST(DelaySampler, NormalJitterMeanWithinTwoPercent) {
  for (const char* name : {"4g", "3g"}) {
    auto p = preset(name, 11);
    DelaySampler s(p, "leg");
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      auto d = s.sample();
      ASSERT_GE(d, Duration::zero());
      sum += static_cast<double>(d.count());
    }
    double base = static_cast<double>(p.base_delay.count());
    EXPECT_NEAR(sum / n, base, 0.02 * base) << name;
  }
}

TEST(DelaySampler, UnclampedNormalNeverNegative) {
  NetProfile p;
  p.base_delay = 1ms;
  p.jitter = {JitterKind::normal, 0ms, 2ms};
  DelaySampler s(p, "leg");
  for (int i = 0; i < 100000; ++i) ASSERT_GE(s.sample(), Duration::zero());
}

TEST(DelaySampler, StreamsDependOnSeedAndLinkOnly) {
  auto p = preset("3g", 5);
  DelaySampler a1(p, "x"), a2(p, "x"), b(p, "y");
  int same_as_other_link = 0;
  for (int i = 0; i < 100; ++i) {
    auto v = a1.sample();
    EXPECT_EQ(v, a2.sample());
    same_as_other_link += v == b.sample();
  }
  EXPECT_LT(same_as_other_link, 5);
  EXPECT_NE(link_seed(1, "x"), link_seed(2, "x"));
}

TEST(DelaySampler, LossIsBinomial) {
  NetProfile p;
  p.loss_prob = 0.5;
  p.seed = 3;
  DelaySampler s(p, "lossy");
  int delivered = 0;
  for (int i = 0; i < 1000; ++i) delivered += !s.lost();
  EXPECT_NEAR(delivered, 500, 50);
}

namespace {

struct Collector {
  std::mutex mutex;
  std::vector<std::string> got;
  std::vector<std::chrono::steady_clock::time_point> at;
  void operator()(std::string&& s) {
    std::lock_guard lock(mutex);
    got.push_back(std::move(s));
    at.push_back(std::chrono::steady_clock::now());
  }
};

}  // namespace

TEST(ShapedLink, PreservesOrderUnderJitter) {
  Collector c;
  ShapedLink link("fifo", [&](std::string&& s) { c(std::move(s)); });
  NetProfile p;
  p.base_delay = 1ms;
  p.jitter = {JitterKind::normal, 0ms, 1ms};
  p.seed = 4;
  link.attach(p);
  const int n = 2000;
  for (int i = 0; i < n; ++i) link.send(std::to_string(i));
  link.close(true, 10s);
  ASSERT_EQ(c.got.size(), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ASSERT_EQ(c.got[i], std::to_string(i));
}

TEST(ShapedLink, DelaysByBase) {
  Collector c;
  ShapedLink link("slow", [&](std::string&& s) { c(std::move(s)); });
  NetProfile p;
  p.base_delay = 20ms;
  link.attach(p);
  auto t0 = std::chrono::steady_clock::now();
  link.send("x");
  link.close(true);
  ASSERT_EQ(c.at.size(), 1u);
  auto d = c.at[0] - t0;
  EXPECT_GE(d, 20ms);
  EXPECT_LT(d, 30ms);
}

TEST(ShapedLink, SecondAttachThrows) {
  ShapedLink link("x", [](std::string&&) {});
  link.attach(preset("lan"));
  try {
    link.attach(preset("lan"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlreadyShaped);
  }
}

TEST(ShapedLink, LossCountsAndNonDroppablePayloads) {
  Collector c;
  ShapedLink link("lossy", [&](std::string&& s) { c(std::move(s)); });
  NetProfile p;
  p.loss_prob = 0.5;
  p.seed = 8;
  link.attach(p);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) accepted += link.send("d");
  for (int i = 0; i < 10; ++i) EXPECT_TRUE(link.send("control", false));
  link.close(true);
  EXPECT_NEAR(accepted, 500, 50);
  EXPECT_EQ(c.got.size(), static_cast<std::size_t>(accepted + 10));
  EXPECT_EQ(link.stats().lost, static_cast<std::size_t>(1000 - accepted));
}

TEST(ShapedLink, DropOldestOnOverflow) {
  Collector c;
  ShapedLink link("tiny", [&](std::string&& s) { c(std::move(s)); }, 4, OverflowPolicy::drop_oldest);
  NetProfile p;
  p.base_delay = 50ms;
  link.attach(p);
  for (int i = 0; i < 10; ++i) link.send(std::to_string(i));
  link.close(true);
  EXPECT_EQ(link.stats().overflow_dropped, 6u);
  EXPECT_EQ(c.got, (std::vector<std::string>{"6", "7", "8", "9"}));
}

TEST(ShapedLink, DisconnectOnOverflow) {
  std::atomic<bool> failed{false};
  ShapedLink link("tiny", [](std::string&&) {}, 2, OverflowPolicy::disconnect);
  link.on_failure([&] { failed = true; });
  NetProfile p;
  p.base_delay = 50ms;
  link.attach(p);
  link.send("a");
  link.send("b");
  EXPECT_THROW(
      {
        link.send("c");
        link.send("d");
      },
      Error);
  EXPECT_TRUE(failed);
}

TEST(ShapedLink, SendAfterCloseThrows) {
  ShapedLink link("x", [](std::string&&) {});
  link.close();
  try {
    link.send("late");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SessionClosed);
  }
}
