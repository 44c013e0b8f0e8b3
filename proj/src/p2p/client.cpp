#include "smb/p2p/client.hpp"

#include "smb/error.hpp"

namespace smb::p2p {

namespace {

std::exception_ptr unreachable(const std::string& what) {
  return std::make_exception_ptr(Error(ErrorCode::PeerUnreachable, what));
}

}  // namespace

PeerClient::PeerClient(PeerDirectory directory, PeerClientOptions options)
    : directory_(std::move(directory)), options_(std::move(options)) {
  options_.profile.validate();
}

PeerClient::~PeerClient() { close(); }

std::shared_ptr<PeerClient::Link> PeerClient::link_for(const std::string& signal) {
  const auto& owner = directory_.owner(signal);
  const std::string key = owner.str();
  std::lock_guard lock(links_mutex_);
  auto it = links_.find(key);
  if (it != links_.end()) {
    bool dead = false;
    {
      std::lock_guard l(it->second->mutex);
      dead = it->second->dead;
    }
    if (!dead) return it->second;
    retired_.push_back(std::move(it->second));
    links_.erase(it);
  }

  wire::TcpStream stream;
  try {
    stream = wire::TcpStream::connect(owner, options_.timeout);
    stream.write_line(wire::encode(wire::Frame::hello(options_.name)));
    auto line = stream.read_line(options_.timeout);
    if (!line || wire::decode(*line).op != "welcome") {
      throw Error(ErrorCode::PeerUnreachable, key + ": handshake rejected");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PeerUnreachable) throw;
    throw Error(ErrorCode::PeerUnreachable, key + ": " + e.what());
  }

  auto link = std::make_shared<Link>();
  link->conn = std::make_unique<wire::Connection>(std::move(stream), options_.name + "->" + key);
  link->conn->attach(options_.profile);
  Link* raw = link.get();
  link->conn->start([raw](wire::Frame&& f) { on_frame(*raw, std::move(f)); },
                    [raw] { on_closed(*raw); });
  links_.emplace(key, link);
  return link;
}

void PeerClient::on_frame(Link& link, wire::Frame&& f) {
  std::lock_guard lock(link.mutex);
  if (link.pending.empty()) return;
  Pending p = std::move(link.pending.front());
  link.pending.pop_front();

  if (auto* get = std::get_if<std::promise<SignalRecord>>(&p)) {
    if (f.op == "val") {
      get->set_value(f.record());
    } else if (f.op == "err" && f.error == "Empty") {
      get->set_exception(std::make_exception_ptr(Error(ErrorCode::Empty, f.topic.value_or("") + " has no value yet")));
    } else if (f.op == "err" && f.error == "UnknownSignal") {
      get->set_exception(std::make_exception_ptr(Error(ErrorCode::UnknownSignal, f.topic.value_or("") + " unknown at owner")));
    } else {
      get->set_exception(unreachable("unexpected reply '" + f.op + "'"));
    }
    return;
  }
  auto& set = std::get<std::promise<SetAck>>(p);
  if (f.op == "ack") {
    set.set_value(SetAck{f.applied.value_or(false), false});
  } else if (f.op == "err" && f.error == "UnknownSignal") {
    set.set_exception(std::make_exception_ptr(Error(ErrorCode::UnknownSignal, f.topic.value_or("") + " unknown at owner")));
  } else {
    set.set_exception(unreachable("unexpected reply '" + f.op + "'"));
  }
}

void PeerClient::on_closed(Link& link) {
  std::lock_guard lock(link.mutex);
  link.dead = true;
  for (auto& p : link.pending) {
    std::visit([](auto& promise) { promise.set_exception(unreachable("connection lost")); }, p);
  }
  link.pending.clear();
}

SignalRecord PeerClient::get_signal(const std::string& name) {
  auto link = link_for(name);
  std::future<SignalRecord> fut;
  {
    std::lock_guard lock(link->mutex);
    if (link->dead) throw Error(ErrorCode::PeerUnreachable, name + ": connection lost");
    std::promise<SignalRecord> promise;
    fut = promise.get_future();
    link->pending.emplace_back(std::move(promise));
    bool sent = false;
    try {
      sent = link->conn->send(wire::Frame::get(name), /*droppable=*/true);
    } catch (const Error&) {
      link->pending.pop_back();
      throw Error(ErrorCode::PeerUnreachable, name + ": connection lost");
    }
    if (!sent) {
      link->pending.pop_back();
      throw Error(ErrorCode::PeerUnreachable, name + ": request lost");
    }
  }
  if (fut.wait_for(options_.timeout) != std::future_status::ready) {
    throw Error(ErrorCode::PeerUnreachable, name + ": no reply within timeout");
  }
  return fut.get();
}

std::future<SetAck> PeerClient::set_signal_async(const SignalRecord& rec) {
  auto link = link_for(rec.signal);
  std::lock_guard lock(link->mutex);
  if (link->dead) throw Error(ErrorCode::PeerUnreachable, rec.signal + ": connection lost");
  std::promise<SetAck> promise;
  auto fut = promise.get_future();
  link->pending.emplace_back(std::move(promise));
  bool sent = false;
  try {
    sent = link->conn->send(wire::Frame::set(rec), /*droppable=*/true);
  } catch (const Error&) {
    link->pending.pop_back();
    throw Error(ErrorCode::PeerUnreachable, rec.signal + ": connection lost");
  }
  if (!sent) {
    std::get<std::promise<SetAck>>(link->pending.back()).set_value(SetAck{false, true});
    link->pending.pop_back();
  }
  return fut;
}

SetAck PeerClient::set_signal(const SignalRecord& rec) {
  auto fut = set_signal_async(rec);
  if (fut.wait_for(options_.timeout) != std::future_status::ready) {
    throw Error(ErrorCode::PeerUnreachable, rec.signal + ": no ack within timeout");
  }
  return fut.get();
}

void PeerClient::close() {
  std::map<std::string, std::shared_ptr<Link>> links;
  std::vector<std::shared_ptr<Link>> retired;
  {
    std::lock_guard lock(links_mutex_);
    links.swap(links_);
    retired.swap(retired_);
  }
  for (auto& [key, link] : links) link->conn->close(true);
  for (auto& link : retired) link->conn->close(false);
}

}  // namespace smb::p2p
