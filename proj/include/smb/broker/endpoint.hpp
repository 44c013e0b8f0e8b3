#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "smb/broker/client.hpp"
#include "smb/core/endpoint.hpp"
#include "smb/core/wiring.hpp"

namespace smb::broker {

/// Endpoint over a broker session. Outputs are published under their own
/// name; each input subscribes to the output wired to it and incoming
/// records are relabelled with the input name.
class BrokerEndpoint final : public Endpoint {
 public:
  BrokerEndpoint(std::unique_ptr<BrokerClient> client, const WiringConfig& wiring,
                 const std::vector<std::string>& inputs, const std::vector<std::string>& outputs);

  void send(const SignalRecord& rec) override;
  std::optional<SignalRecord> receive(Duration timeout) override;
  void close() override;

  [[nodiscard]] BrokerClient& client() { return *client_; }

 private:
  std::unique_ptr<BrokerClient> client_;
  std::map<std::string, std::vector<std::string>> inputs_by_topic_;
  std::map<std::string, std::vector<std::string>> downstream_;
  std::deque<SignalRecord> pending_;
};

}  // namespace smb::broker
