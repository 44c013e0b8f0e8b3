#include "smb/broker/endpoint.hpp"

#include "smb/error.hpp"

namespace smb::broker {

BrokerEndpoint::BrokerEndpoint(std::unique_ptr<BrokerClient> client, const WiringConfig& wiring,
                               const std::vector<std::string>& inputs,
                               const std::vector<std::string>& outputs)
    : client_(std::move(client)) {
  for (const auto& out : outputs) downstream_[out] = wiring.downstream_of(out);
  for (const auto& in : inputs) {
    auto up = wiring.upstream_of(in);
    if (up.empty()) continue;
    auto& slot = inputs_by_topic_[up];
    if (slot.empty()) client_->subscribe(up);
    slot.push_back(in);
  }
}

void BrokerEndpoint::send(const SignalRecord& rec) {
  auto it = downstream_.find(rec.signal);
  if (it == downstream_.end()) {
    throw Error(ErrorCode::UnknownSignal, "'" + rec.signal + "' is not an output of " + client_->name());
  }
  try {
    (void)client_->publish_async(rec);
  } catch (const Error& e) {
    throw Error(ErrorCode::TransportDown, e.what());
  }
  for (const auto& to : it->second) trace_send(rec.signal, to, rec);
}

std::optional<SignalRecord> BrokerEndpoint::receive(Duration timeout) {
  if (pending_.empty()) {
    std::optional<SignalRecord> rec;
    try {
      rec = client_->receive(timeout);
    } catch (const Error& e) {
      throw Error(ErrorCode::TransportDown, e.what());
    }
    if (!rec) return std::nullopt;
    auto it = inputs_by_topic_.find(rec->signal);
    if (it == inputs_by_topic_.end()) return std::nullopt;
    for (const auto& in : it->second) {
      SignalRecord copy = *rec;
      copy.signal = in;
      pending_.push_back(std::move(copy));
    }
  }
  SignalRecord out = std::move(pending_.front());
  pending_.pop_front();
  return out;
}

void BrokerEndpoint::close() { client_->close(); }

}  // namespace smb::broker
