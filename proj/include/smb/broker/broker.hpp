#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "smb/core/clock.hpp"
#include "smb/netem/profile.hpp"
#include "smb/netem/shaped_link.hpp"
#include "smb/wire/connection.hpp"

namespace smb::broker {

struct BrokerConfig {
  wire::HostPort listen{"127.0.0.1", 0};
  std::size_t max_clients = 64;
  std::size_t queue_depth = 1024;
  netem::OverflowPolicy overflow = netem::OverflowPolicy::drop_oldest;
  /// Shapes every broker -> client leg.
  netem::NetProfile profile;
  Duration handshake_timeout = std::chrono::seconds(5);

  void validate() const;
};

/// Exact signal name, or a prefix followed by a single trailing "/*".
class Subscription {
 public:
  /// Throws BadPattern.
  explicit Subscription(std::string pattern);

  [[nodiscard]] bool matches(std::string_view topic) const;
  [[nodiscard]] const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::string prefix_;  // "drts/" for "drts/*"; empty for exact patterns
};

bool is_valid_pattern(std::string_view pattern);

struct BrokerStats {
  std::size_t published = 0;
  std::size_t routed = 0;
  std::size_t clients = 0;
  std::size_t refused = 0;
};

/// Central publish/subscribe router. Records from one publisher reach each
/// subscriber in publish order; nothing is retained for late subscribers.
class Broker {
 public:
  /// Binds and starts accepting. Throws AddressInUse.
  static std::unique_ptr<Broker> serve(BrokerConfig cfg);
  ~Broker();

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  [[nodiscard]] wire::HostPort address() const { return address_; }

  /// Stops accepting; with drain=true, queued deliveries are flushed first.
  void shutdown(bool drain = true);

  [[nodiscard]] BrokerStats stats() const;

 private:
  struct Session {
    std::uint64_t id = 0;
    std::string name;
    std::unique_ptr<wire::Connection> conn;
    std::vector<Subscription> subs;
    std::atomic<bool> dead{false};
  };

  explicit Broker(BrokerConfig cfg);
  void accept_loop();
  void admit(wire::TcpStream stream);
  void on_frame(Session& s, wire::Frame&& f);
  void route(const wire::Frame& pub);
  void reap();

  BrokerConfig cfg_;
  wire::TcpListener listener_;
  wire::HostPort address_;
  ScenarioClock clock_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions_;
  std::vector<std::shared_ptr<Session>> graveyard_;
  std::uint64_t next_id_ = 1;

  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> published_{0};
  std::atomic<std::size_t> routed_{0};
  std::atomic<std::size_t> refused_{0};
  std::thread acceptor_;
};

}  // namespace smb::broker
