#pragma once

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <deque>
#include <vector>

#include "smb/core/signal.hpp"
#include "smb/netem/profile.hpp"
#include "smb/p2p/directory.hpp"
#include "smb/wire/connection.hpp"

namespace smb::p2p {

struct PeerClientOptions {
  std::string name = "client";
  /// Shapes every client -> server (request) leg.
  netem::NetProfile profile;
  Duration timeout = std::chrono::seconds(1);
};

struct SetAck {
  bool applied = false;
  /// The loss model dropped the request.
  bool lost = false;
};

/// Direct request/response access to signals served by peers. Requests to
/// one owner are pipelined over a single connection.
class PeerClient {
 public:
  PeerClient(PeerDirectory directory, PeerClientOptions options = {});
  ~PeerClient();

  PeerClient(const PeerClient&) = delete;
  PeerClient& operator=(const PeerClient&) = delete;

  /// Owner's latest record. Throws UnknownSignal, PeerUnreachable, Empty.
  SignalRecord get_signal(const std::string& name);

  /// Throws UnknownSignal, PeerUnreachable.
  SetAck set_signal(const SignalRecord& rec);
  std::future<SetAck> set_signal_async(const SignalRecord& rec);

  [[nodiscard]] const PeerDirectory& directory() const { return directory_; }
  void close();

 private:
  using Pending = std::variant<std::promise<SignalRecord>, std::promise<SetAck>>;
  struct Link {
    std::unique_ptr<wire::Connection> conn;
    std::mutex mutex;
    std::deque<Pending> pending;
    bool dead = false;
  };

  std::shared_ptr<Link> link_for(const std::string& signal);
  static void on_frame(Link& link, wire::Frame&& f);
  static void on_closed(Link& link);

  PeerDirectory directory_;
  PeerClientOptions options_;
  std::mutex links_mutex_;
  std::map<std::string, std::shared_ptr<Link>> links_;
  std::vector<std::shared_ptr<Link>> retired_;
};

}  // namespace smb::p2p
