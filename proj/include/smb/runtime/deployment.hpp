#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smb/broker/broker.hpp"
#include "smb/core/endpoint.hpp"
#include "smb/core/wiring.hpp"
#include "smb/netem/profile.hpp"

namespace smb::runtime {

enum class TransportKind { broker, p2p };

/// Throws InvalidArgument.
TransportKind transport_from_string(std::string_view s);
std::string_view to_string(TransportKind t);

struct ComponentSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
};

struct DeploymentOptions {
  TransportKind transport = TransportKind::broker;
  /// Applied to every leg: client -> broker and broker -> client, or
  /// peer -> peer.
  netem::NetProfile profile;
  /// Listen address and queue settings for the broker; its profile is
  /// replaced by `profile`.
  broker::BrokerConfig broker;
  Duration peer_timeout = std::chrono::seconds(5);
};

/// A set of components connected in-process over real sockets, either
/// through one broker or peer to peer.
class Deployment {
 public:
  /// Validates the wiring against the components' signals and connects
  /// everything.
  Deployment(const WiringConfig& wiring, const std::vector<ComponentSpec>& components,
             DeploymentOptions options);
  ~Deployment();

  Deployment(const Deployment&) = delete;
  Deployment& operator=(const Deployment&) = delete;

  /// Throws UnknownComponent.
  Endpoint& endpoint(const std::string& component);
  [[nodiscard]] broker::Broker* broker() { return broker_.get(); }

  /// Closes every endpoint, then the broker.
  void close();

 private:
  std::unique_ptr<broker::Broker> broker_;
  std::map<std::string, std::unique_ptr<Endpoint>> endpoints_;
  bool closed_ = false;
};

}  // namespace smb::runtime
