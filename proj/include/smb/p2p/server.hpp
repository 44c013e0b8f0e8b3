#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "smb/core/clock.hpp"
#include "smb/core/signal.hpp"
#include "smb/netem/profile.hpp"
#include "smb/wire/connection.hpp"

namespace smb::p2p {

struct PeerServerOptions {
  std::string name = "peer";
  /// Shapes every server -> client (response) leg.
  netem::NetProfile profile;
  Duration handshake_timeout = std::chrono::seconds(5);
};

/// Latest value of one owned signal.
struct SignalCell {
  std::optional<SignalRecord> latest;
  Timestamp updated_at;
};

/// Serves read/replace on a fixed set of owned signals. A write is applied
/// only if its seq is greater than the cell's current seq.
class PeerServer {
 public:
  using UpdateHandler = std::function<void(const SignalRecord&)>;

  /// Throws AddressInUse.
  static std::unique_ptr<PeerServer> serve(const std::set<std::string>& owned,
                                           const wire::HostPort& address,
                                           PeerServerOptions options = {});
  ~PeerServer();

  PeerServer(const PeerServer&) = delete;
  PeerServer& operator=(const PeerServer&) = delete;

  [[nodiscard]] wire::HostPort address() const { return address_; }
  [[nodiscard]] const std::string& name() const { return options_.name; }

  /// Throws UnknownSignal.
  [[nodiscard]] SignalCell read_local(const std::string& signal) const;
  /// Applies a local write under the same monotone rule; returns applied.
  bool write_local(const SignalRecord& rec);

  /// Called (on a connection thread) for every applied remote write.
  void on_update(UpdateHandler handler);

  void shutdown();

 private:
  struct Cell {
    mutable std::mutex mutex;
    SignalCell value;
  };
  struct Peer {
    std::unique_ptr<wire::Connection> conn;
    std::atomic<bool> dead{false};
  };

  explicit PeerServer(PeerServerOptions options);
  void accept_loop();
  void admit(wire::TcpStream stream);
  void on_frame(Peer& peer, wire::Frame&& f);
  bool apply(const SignalRecord& rec);
  Cell* find(const std::string& signal);
  const Cell* find(const std::string& signal) const;

  PeerServerOptions options_;
  ScenarioClock clock_;
  wire::TcpListener listener_;
  wire::HostPort address_;
  std::map<std::string, std::unique_ptr<Cell>> cells_;

  std::mutex peers_mutex_;
  std::vector<std::shared_ptr<Peer>> peers_;
  std::mutex handler_mutex_;
  UpdateHandler handler_;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
};

}  // namespace smb::p2p
