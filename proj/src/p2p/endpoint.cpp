#include "smb/p2p/endpoint.hpp"

#include "smb/error.hpp"

namespace smb::p2p {

PeerEndpoint::PeerEndpoint(std::unique_ptr<PeerServer> server, PeerDirectory directory,
                           const WiringConfig& wiring, const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs,
                           PeerClientOptions client_options)
    : server_(std::move(server)),
      client_(std::move(directory), std::move(client_options)),
      inputs_(inputs.begin(), inputs.end()) {
  for (const auto& out : outputs) downstream_[out] = wiring.downstream_of(out);
  server_->on_update([this](const SignalRecord& rec) {
    if (!inputs_.contains(rec.signal)) return;
    std::lock_guard lock(mutex_);
    inbox_.push_back(rec);
    cv_.notify_one();
  });
}

PeerEndpoint::~PeerEndpoint() { close(); }

void PeerEndpoint::send(const SignalRecord& rec) {
  auto it = downstream_.find(rec.signal);
  if (it == downstream_.end()) {
    throw Error(ErrorCode::UnknownSignal, "'" + rec.signal + "' is not an output of " + server_->name());
  }
  try {
    server_->write_local(rec);
  } catch (const Error&) {
    // outputs are optional on the local server
  }
  for (const auto& to : it->second) {
    SignalRecord pushed = rec;
    pushed.signal = to;
    try {
      (void)client_.set_signal_async(pushed);
    } catch (const Error& e) {
      throw Error(ErrorCode::TransportDown, e.what());
    }
    trace_send(rec.signal, to, rec);
  }
}

std::optional<SignalRecord> PeerEndpoint::receive(Duration timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [this] { return !inbox_.empty() || closed_; });
  if (inbox_.empty()) {
    if (closed_) throw Error(ErrorCode::TransportDown, server_->name() + ": endpoint closed");
    return std::nullopt;
  }
  SignalRecord rec = std::move(inbox_.front());
  inbox_.pop_front();
  return rec;
}

void PeerEndpoint::close() {
  {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    closed_ = true;
    cv_.notify_all();
  }
  client_.close();
  server_->shutdown();
}

}  // namespace smb::p2p
