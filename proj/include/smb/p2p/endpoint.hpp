#pragma once

#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "smb/core/endpoint.hpp"
#include "smb/core/wiring.hpp"
#include "smb/p2p/client.hpp"
#include "smb/p2p/server.hpp"

namespace smb::p2p {

/// Endpoint where every participant serves its own signals. Sending an
/// output writes it locally and pushes it straight into the server owning
/// each wired input; nothing passes through an intermediate bus.
class PeerEndpoint final : public Endpoint {
 public:
  /// `server` must own this endpoint's inputs (and normally its outputs).
  PeerEndpoint(std::unique_ptr<PeerServer> server, PeerDirectory directory,
               const WiringConfig& wiring, const std::vector<std::string>& inputs,
               const std::vector<std::string>& outputs, PeerClientOptions client_options);
  ~PeerEndpoint() override;

  void send(const SignalRecord& rec) override;
  std::optional<SignalRecord> receive(Duration timeout) override;
  void close() override;

  [[nodiscard]] PeerServer& server() { return *server_; }
  [[nodiscard]] PeerClient& client() { return client_; }

 private:
  std::unique_ptr<PeerServer> server_;
  PeerClient client_;
  std::map<std::string, std::vector<std::string>> downstream_;
  std::set<std::string> inputs_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<SignalRecord> inbox_;
  bool closed_ = false;
};

}  // namespace smb::p2p
