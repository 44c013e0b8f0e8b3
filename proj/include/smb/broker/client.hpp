#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "smb/broker/broker.hpp"
#include "smb/core/signal.hpp"
#include "smb/wire/connection.hpp"

namespace smb::broker {

struct ClientOptions {
  /// Shapes the client -> broker leg.
  netem::NetProfile profile;
  Duration handshake_timeout = std::chrono::seconds(5);
  /// Received records buffered before the reader stops draining the socket.
  std::size_t inbox_capacity = 1 << 16;
};

struct PubAck {
  std::uint64_t seq = 0;
  /// Broker wall clock at receipt (broker-relative).
  Timestamp broker_ts;
  /// The loss model dropped the frame; no broker saw it.
  bool lost = false;
};

/// One client session with a broker. Use from one thread at a time.
class BrokerClient {
 public:
  /// Throws ConnectionRefused or HandshakeTimeout.
  static std::unique_ptr<BrokerClient> connect(const wire::HostPort& address, std::string name,
                                               ClientOptions options = {});
  ~BrokerClient();

  BrokerClient(const BrokerClient&) = delete;
  BrokerClient& operator=(const BrokerClient&) = delete;

  [[nodiscard]] std::uint64_t id() const { return id_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  /// Returns once the broker confirmed the subscription. Throws BadPattern
  /// or SessionClosed.
  void subscribe(const std::string& pattern, Duration timeout = std::chrono::seconds(5));

  /// Waits for the broker's ack. Throws SessionClosed.
  PubAck publish(const SignalRecord& rec, Duration timeout = std::chrono::seconds(5));
  std::future<PubAck> publish_async(const SignalRecord& rec);

  /// Next delivered record. nullopt on timeout. Throws SessionClosed once
  /// the session is gone and nothing is buffered.
  std::optional<SignalRecord> receive(Duration timeout);

  void close();
  [[nodiscard]] bool open() const;

 private:
  BrokerClient(std::unique_ptr<wire::Connection> conn, std::uint64_t id, std::string name,
               std::size_t inbox_capacity);
  void on_frame(wire::Frame&& f);
  void on_closed();

  std::unique_ptr<wire::Connection> conn_;
  std::uint64_t id_;
  std::string name_;
  std::size_t inbox_capacity_;

  mutable std::mutex mutex_;
  std::condition_variable inbox_cv_;
  std::condition_variable space_cv_;
  std::deque<SignalRecord> inbox_;
  std::deque<std::promise<PubAck>> pending_acks_;
  std::deque<std::promise<void>> pending_subs_;
  bool closed_ = false;
};

}  // namespace smb::broker
