#include "smb/p2p/server.hpp"

#include <spdlog/spdlog.h>

#include "smb/error.hpp"

namespace smb::p2p {

using namespace std::chrono_literals;

PeerServer::PeerServer(PeerServerOptions options) : options_(std::move(options)) {}

std::unique_ptr<PeerServer> PeerServer::serve(const std::set<std::string>& owned,
                                              const wire::HostPort& address,
                                              PeerServerOptions options) {
  options.profile.validate();
  std::unique_ptr<PeerServer> s(new PeerServer(std::move(options)));
  for (const auto& name : owned) {
    if (!is_valid_signal_name(name)) throw Error(ErrorCode::InvalidArgument, "bad signal name '" + name + "'");
    s->cells_.emplace(name, std::make_unique<Cell>());
  }
  s->listener_ = wire::TcpListener::bind(address);
  s->address_ = s->listener_.local();
  s->acceptor_ = std::thread([raw = s.get()] { raw->accept_loop(); });
  return s;
}

PeerServer::~PeerServer() { shutdown(); }

PeerServer::Cell* PeerServer::find(const std::string& signal) {
  auto it = cells_.find(signal);
  return it == cells_.end() ? nullptr : it->second.get();
}

const PeerServer::Cell* PeerServer::find(const std::string& signal) const {
  auto it = cells_.find(signal);
  return it == cells_.end() ? nullptr : it->second.get();
}

SignalCell PeerServer::read_local(const std::string& signal) const {
  const Cell* c = find(signal);
  if (c == nullptr) throw Error(ErrorCode::UnknownSignal, "'" + signal + "' not served by " + name());
  std::lock_guard lock(c->mutex);
  return c->value;
}

bool PeerServer::apply(const SignalRecord& rec) {
  Cell* c = find(rec.signal);
  if (c == nullptr) throw Error(ErrorCode::UnknownSignal, "'" + rec.signal + "' not served by " + name());
  std::lock_guard lock(c->mutex);
  if (c->value.latest && rec.seq <= c->value.latest->seq) return false;
  c->value.latest = rec;
  c->value.updated_at = clock_.wall_now();
  return true;
}

bool PeerServer::write_local(const SignalRecord& rec) { return apply(rec); }

void PeerServer::on_update(UpdateHandler handler) {
  std::lock_guard lock(handler_mutex_);
  handler_ = std::move(handler);
}

void PeerServer::accept_loop() {
  while (!stopping_) {
    auto stream = listener_.accept(50ms);
    if (!stream || stopping_) continue;
    try {
      admit(std::move(*stream));
    } catch (const std::exception& e) {
      spdlog::debug("{}: handshake failed: {}", name(), e.what());
    }
  }
}

void PeerServer::admit(wire::TcpStream stream) {
  auto line = stream.read_line(options_.handshake_timeout);
  if (!line) return;
  auto hello = wire::decode(*line);
  if (hello.op != "hello" || !hello.client) {
    stream.write_line(wire::encode(wire::Frame::failure("expected hello")));
    return;
  }
  auto peer = std::make_shared<Peer>();
  peer->conn = std::make_unique<wire::Connection>(std::move(stream), name() + "->" + *hello.client);
  peer->conn->attach(options_.profile);
  peer->conn->send_now(wire::Frame::welcome(0));
  Peer* raw = peer.get();
  peer->conn->start([this, raw](wire::Frame&& f) { on_frame(*raw, std::move(f)); },
                    [raw] { raw->dead = true; });
  std::lock_guard lock(peers_mutex_);
  peers_.push_back(std::move(peer));
}

void PeerServer::on_frame(Peer& peer, wire::Frame&& f) {
  const std::string topic = f.topic.value_or("");
  if (f.op == "get") {
    const Cell* c = find(topic);
    if (c == nullptr) {
      peer.conn->send(wire::Frame::err(topic, "UnknownSignal"));
      return;
    }
    std::optional<SignalRecord> latest;
    {
      std::lock_guard lock(c->mutex);
      latest = c->value.latest;
    }
    peer.conn->send(latest ? wire::Frame::val(*latest) : wire::Frame::err(topic, "Empty"));
    return;
  }
  if (f.op == "set") {
    if (find(topic) == nullptr) {
      peer.conn->send(wire::Frame::err(topic, "UnknownSignal"));
      return;
    }
    SignalRecord rec;
    try {
      rec = f.record();
    } catch (const Error&) {
      peer.conn->send(wire::Frame::err(topic, "InvalidArgument"));
      return;
    }
    bool applied = apply(rec);
    // Ack first so the writer's pipeline is not held up by local consumers.
    peer.conn->send(wire::Frame::set_ack(applied));
    if (applied) {
      std::lock_guard lock(handler_mutex_);
      if (handler_) handler_(rec);
    }
    return;
  }
  peer.conn->send(wire::Frame::err(topic, "unsupported op '" + f.op + "'"));
}

void PeerServer::shutdown() {
  if (stopping_.exchange(true)) return;
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  std::vector<std::shared_ptr<Peer>> peers;
  {
    std::lock_guard lock(peers_mutex_);
    peers.swap(peers_);
  }
  for (auto& p : peers) p->conn->close(false);
}

}  // namespace smb::p2p
