#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "smb/core/signal.hpp"

namespace smb::wire {

/// One newline-delimited JSON frame of the broker and peer protocols.
///
///   hello   {"op":"hello","client":NAME}            client -> broker
///   welcome {"op":"welcome","id":N}                 broker -> client
///   error   {"op":"error","error":TEXT}             any direction
///   sub     {"op":"sub","topic":PATTERN}            client -> broker
///   suback  {"op":"suback","topic":PATTERN}         broker -> client
///   pub     {"op":"pub","topic":T,"value":V,"ts":NS,"seq":S}
///   ack     {"op":"ack","ts":NS,"seq":S}            broker -> publisher
///   msg     {"op":"msg","topic":T,"value":V,"ts":NS,"seq":S}
///   get     {"op":"get","topic":T}                  peer client -> server
///   val     {"op":"val","topic":T,"value":V,"ts":NS,"seq":S}
///   set     {"op":"set","topic":T,"value":V,"ts":NS,"seq":S}
///   ack     {"op":"ack","applied":BOOL}             peer server -> client
///   err     {"op":"err","topic":T,"error":CODE}     peer server -> client
///
/// Keys are always emitted in the order listed above.
struct Frame {
  std::string op;
  std::optional<std::string> client;
  std::optional<std::uint64_t> id;
  std::optional<std::string> topic;
  std::optional<double> value;
  std::optional<std::uint64_t> ts;
  std::optional<std::uint64_t> seq;
  std::optional<bool> applied;
  std::optional<std::string> error;

  static Frame hello(std::string client);
  static Frame welcome(std::uint64_t id);
  static Frame failure(std::string reason);
  static Frame sub(std::string pattern);
  static Frame suback(std::string pattern);
  static Frame pub(const SignalRecord& rec);
  static Frame pub_ack(std::uint64_t seq, std::uint64_t broker_ts);
  static Frame msg(const SignalRecord& rec);
  static Frame get(std::string topic);
  static Frame val(const SignalRecord& rec);
  static Frame set(const SignalRecord& rec);
  static Frame set_ack(bool applied);
  static Frame err(std::string topic, std::string code);

  /// Record carried by pub/msg/val/set frames, stamped in the given domain.
  [[nodiscard]] SignalRecord record(ClockDomain domain = ClockDomain::wall) const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Single line without the trailing newline.
std::string encode(const Frame& f);
/// Throws InvalidArgument on malformed input.
Frame decode(std::string_view line);

}  // namespace smb::wire
