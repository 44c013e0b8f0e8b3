#include "smb/runtime/deployment.hpp"

#include <set>

#include "smb/broker/endpoint.hpp"
#include "smb/error.hpp"
#include "smb/p2p/endpoint.hpp"

namespace smb::runtime {

TransportKind transport_from_string(std::string_view s) {
  if (s == "broker") return TransportKind::broker;
  if (s == "p2p") return TransportKind::p2p;
  throw Error(ErrorCode::InvalidArgument, "transport must be broker or p2p, got '" + std::string(s) + "'");
}

std::string_view to_string(TransportKind t) { return t == TransportKind::broker ? "broker" : "p2p"; }

Deployment::Deployment(const WiringConfig& wiring, const std::vector<ComponentSpec>& components,
                       DeploymentOptions options) {
  options.profile.validate();
  std::set<SignalId> known;
  for (const auto& c : components) {
    for (const auto& in : c.inputs) known.insert(SignalId::input(in));
    for (const auto& out : c.outputs) known.insert(SignalId::output(out));
  }
  validate_wiring(wiring, known);

  if (options.transport == TransportKind::broker) {
    auto cfg = options.broker;
    cfg.profile = options.profile;
    if (cfg.max_clients < components.size()) {
      throw Error(ErrorCode::InvalidArgument, "broker max_clients is below the number of components");
    }
    broker_ = broker::Broker::serve(cfg);
    for (const auto& c : components) {
      broker::ClientOptions copts;
      copts.profile = options.profile;
      auto client = broker::BrokerClient::connect(broker_->address(), c.name, copts);
      endpoints_[c.name] = std::make_unique<broker::BrokerEndpoint>(std::move(client), wiring, c.inputs, c.outputs);
    }
    return;
  }

  std::map<std::string, std::unique_ptr<p2p::PeerServer>> servers;
  p2p::PeerDirectory directory;
  for (const auto& c : components) {
    std::set<std::string> owned(c.inputs.begin(), c.inputs.end());
    owned.insert(c.outputs.begin(), c.outputs.end());
    p2p::PeerServerOptions sopts;
    sopts.name = c.name;
    sopts.profile = options.profile;
    auto server = p2p::PeerServer::serve(owned, wire::HostPort{"127.0.0.1", 0}, sopts);
    for (const auto& s : owned) directory.add(s, server->address());
    servers[c.name] = std::move(server);
  }
  for (const auto& c : components) {
    p2p::PeerClientOptions copts;
    copts.name = c.name;
    copts.profile = options.profile;
    copts.timeout = options.peer_timeout;
    endpoints_[c.name] = std::make_unique<p2p::PeerEndpoint>(std::move(servers.at(c.name)), directory, wiring,
                                                             c.inputs, c.outputs, copts);
  }
}

Deployment::~Deployment() { close(); }

Endpoint& Deployment::endpoint(const std::string& component) {
  auto it = endpoints_.find(component);
  if (it == endpoints_.end()) throw Error(ErrorCode::UnknownComponent, "no component '" + component + "'");
  return *it->second;
}

void Deployment::close() {
  if (closed_) return;
  closed_ = true;
  for (auto& [name, ep] : endpoints_) {
    try {
      ep->close();
    } catch (const Error&) {
    }
  }
  if (broker_) broker_->shutdown(false);
}

}  // namespace smb::runtime
