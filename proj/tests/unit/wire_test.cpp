#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <fstream>
#include <map>

#include "smb/error.hpp"
#include "smb/wire/frame.hpp"

using namespace smb;
using namespace smb::wire;

namespace {

SignalRecord rec(std::string topic, double value, std::uint64_t ts, std::uint64_t seq) {
  return {std::move(topic), value, Timestamp::wall(ts), seq};
}

std::map<std::string, std::string> golden() {
  std::ifstream in(std::string(SMB_GOLDEN_DIR) + "/frames.txt");
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace

TEST(Frame, MatchesGoldenFile) {
  std::map<std::string, Frame> frames{
      {"hello", Frame::hello("task01")},
      {"welcome", Frame::welcome(7)},
      {"error", Frame::failure("broker full")},
      {"sub", Frame::sub("drts/*")},
      {"suback", Frame::suback("drts/*")},
      {"pub", Frame::pub(rec("t", 1.0, 5, 1))},
      {"pub_ack", Frame::pub_ack(42, 123456789)},
      {"msg", Frame::msg(rec("drts/out07", -2.5, 500000000, 3))},
      {"get", Frame::get("drts/out07")},
      {"val", Frame::val(rec("drts/out07", 42.0, 18446744073709551615ULL, 9))},
      {"set", Frame::set(rec("agent01/to02/self", 0.987654321, 0, 12))},
      {"set_ack", Frame::set_ack(true)},
      {"set_ack_stale", Frame::set_ack(false)},
      {"err", Frame::err("ghost", "UnknownSignal")},
  };
  auto expected = golden();
  ASSERT_EQ(expected.size(), frames.size());
  for (const auto& [name, frame] : frames) {
    ASSERT_TRUE(expected.contains(name)) << name;
    EXPECT_EQ(encode(frame), expected.at(name)) << name;
    EXPECT_EQ(decode(expected.at(name)), frame) << name;
  }
}

TEST(Frame, RecordRoundTrip) {
  auto r = rec("task05/out", 17.0, 123, 17);
  auto back = decode(encode(Frame::pub(r))).record();
  EXPECT_EQ(back.signal, r.signal);
  EXPECT_EQ(back.value, r.value);
  EXPECT_EQ(back.send_ts, r.send_ts);
  EXPECT_EQ(back.seq, r.seq);
  EXPECT_EQ(decode(encode(Frame::msg(r))).record(ClockDomain::sim).send_ts.clock(), ClockDomain::sim);
}

TEST(Frame, ValuesSurviveExactly) {
  for (double v : {0.1, -1e-300, 1e300, 3.141592653589793, 123456789.125}) {
    EXPECT_EQ(decode(encode(Frame::pub(rec("x", v, 1, 1)))).value, v);
  }
}

TEST(Frame, MalformedInputIsRejected) {
  for (const char* bad : {"", "not json", "[]", "{\"topic\":\"x\"}", "{\"op\":3}", "{\"op\":\"pub\",\"seq\":-1}"}) {
    try {
      decode(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidArgument) << bad;
    }
  }
  EXPECT_THROW(Frame::sub("x").record(), Error);
}
