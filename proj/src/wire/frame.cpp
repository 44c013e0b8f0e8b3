#include "smb/wire/frame.hpp"

#include <nlohmann/json.hpp>

#include "smb/error.hpp"

namespace smb::wire {

namespace {

Frame with_record(std::string op, const SignalRecord& rec) {
  Frame f;
  f.op = std::move(op);
  f.topic = rec.signal;
  f.value = rec.value;
  f.ts = rec.send_ts.nanos();
  f.seq = rec.seq;
  return f;
}

}  // namespace

Frame Frame::hello(std::string client) {
  Frame f;
  f.op = "hello";
  f.client = std::move(client);
  return f;
}

Frame Frame::welcome(std::uint64_t id) {
  Frame f;
  f.op = "welcome";
  f.id = id;
  return f;
}

Frame Frame::failure(std::string reason) {
  Frame f;
  f.op = "error";
  f.error = std::move(reason);
  return f;
}

Frame Frame::sub(std::string pattern) {
  Frame f;
  f.op = "sub";
  f.topic = std::move(pattern);
  return f;
}

Frame Frame::suback(std::string pattern) {
  Frame f;
  f.op = "suback";
  f.topic = std::move(pattern);
  return f;
}

Frame Frame::pub(const SignalRecord& rec) { return with_record("pub", rec); }

Frame Frame::pub_ack(std::uint64_t seq, std::uint64_t broker_ts) {
  Frame f;
  f.op = "ack";
  f.ts = broker_ts;
  f.seq = seq;
  return f;
}

Frame Frame::msg(const SignalRecord& rec) { return with_record("msg", rec); }

Frame Frame::get(std::string topic) {
  Frame f;
  f.op = "get";
  f.topic = std::move(topic);
  return f;
}

Frame Frame::val(const SignalRecord& rec) { return with_record("val", rec); }

Frame Frame::set(const SignalRecord& rec) { return with_record("set", rec); }

Frame Frame::set_ack(bool applied) {
  Frame f;
  f.op = "ack";
  f.applied = applied;
  return f;
}

Frame Frame::err(std::string topic, std::string code) {
  Frame f;
  f.op = "err";
  f.topic = std::move(topic);
  f.error = std::move(code);
  return f;
}

SignalRecord Frame::record(ClockDomain domain) const {
  if (!topic || !value || !ts || !seq) {
    throw Error(ErrorCode::InvalidArgument, "'" + op + "' frame carries no record");
  }
  return SignalRecord{*topic, *value, Timestamp(domain, *ts), *seq};
}

std::string encode(const Frame& f) {
  nlohmann::ordered_json j;
  j["op"] = f.op;
  if (f.client) j["client"] = *f.client;
  if (f.id) j["id"] = *f.id;
  if (f.topic) j["topic"] = *f.topic;
  if (f.value) j["value"] = *f.value;
  if (f.ts) j["ts"] = *f.ts;
  if (f.seq) j["seq"] = *f.seq;
  if (f.applied) j["applied"] = *f.applied;
  if (f.error) j["error"] = *f.error;
  return j.dump();
}

Frame decode(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("unparsable frame: ") + e.what());
  }
  if (!j.is_object() || !j.contains("op") || !j.at("op").is_string()) {
    throw Error(ErrorCode::InvalidArgument, "frame without an 'op' string");
  }
  auto unsigned_field = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_unsigned()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
  };
  try {
    Frame f;
    f.op = j.at("op").get<std::string>();
    if (j.contains("client")) f.client = j.at("client").get<std::string>();
    if (j.contains("id")) f.id = unsigned_field("id");
    if (j.contains("topic")) f.topic = j.at("topic").get<std::string>();
    if (j.contains("value")) f.value = j.at("value").get<double>();
    if (j.contains("ts")) f.ts = unsigned_field("ts");
    if (j.contains("seq")) f.seq = unsigned_field("seq");
    if (j.contains("applied")) f.applied = j.at("applied").get<bool>();
    if (j.contains("error")) f.error = j.at("error").get<std::string>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad frame field: ") + e.what());
  }
}

}  // namespace smb::wire
