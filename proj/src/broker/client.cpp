#include "smb/broker/client.hpp"

#include "smb/error.hpp"

namespace smb::broker {

std::unique_ptr<BrokerClient> BrokerClient::connect(const wire::HostPort& address, std::string name,
                                                    ClientOptions options) {
  if (!is_valid_signal_name(name)) {
    throw Error(ErrorCode::InvalidArgument, "bad client name '" + name + "'");
  }
  auto stream = wire::TcpStream::connect(address, options.handshake_timeout);
  stream.write_line(wire::encode(wire::Frame::hello(name)));
  std::optional<std::string> line;
  try {
    line = stream.read_line(options.handshake_timeout);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TimeoutExpired) {
      throw Error(ErrorCode::HandshakeTimeout, address.str() + ": no welcome from broker");
    }
    throw;
  }
  if (!line) throw Error(ErrorCode::ConnectionRefused, address.str() + ": closed during handshake");
  auto reply = wire::decode(*line);
  if (reply.op != "welcome" || !reply.id) {
    throw Error(ErrorCode::ConnectionRefused,
                address.str() + ": " + reply.error.value_or("unexpected '" + reply.op + "'"));
  }

  auto conn = std::make_unique<wire::Connection>(std::move(stream), name + "->broker");
  conn->attach(options.profile);
  std::unique_ptr<BrokerClient> client(
      new BrokerClient(std::move(conn), *reply.id, std::move(name), options.inbox_capacity));
  BrokerClient* raw = client.get();
  raw->conn_->start([raw](wire::Frame&& f) { raw->on_frame(std::move(f)); },
                    [raw] { raw->on_closed(); });
  return client;
}

BrokerClient::BrokerClient(std::unique_ptr<wire::Connection> conn, std::uint64_t id,
                           std::string name, std::size_t inbox_capacity)
    : conn_(std::move(conn)), id_(id), name_(std::move(name)), inbox_capacity_(inbox_capacity) {}

BrokerClient::~BrokerClient() { close(); }

void BrokerClient::subscribe(const std::string& pattern, Duration timeout) {
  Subscription sub(pattern);  // validates locally first
  std::future<void> done;
  {
    std::lock_guard lock(mutex_);
    if (closed_) throw Error(ErrorCode::SessionClosed, name_ + ": session closed");
    pending_subs_.emplace_back();
    done = pending_subs_.back().get_future();
    conn_->send(wire::Frame::sub(sub.pattern()));
  }
  if (done.wait_for(timeout) != std::future_status::ready) {
    throw Error(ErrorCode::TimeoutExpired, name_ + ": no suback for '" + pattern + "'");
  }
  done.get();
}

std::future<PubAck> BrokerClient::publish_async(const SignalRecord& rec) {
  std::lock_guard lock(mutex_);
  if (closed_) throw Error(ErrorCode::SessionClosed, name_ + ": session closed");
  std::promise<PubAck> promise;
  auto fut = promise.get_future();
  // Enqueue the promise before the frame so the ack cannot overtake it.
  pending_acks_.push_back(std::move(promise));
  bool sent = false;
  try {
    sent = conn_->send(wire::Frame::pub(rec), /*droppable=*/true);
  } catch (...) {
    pending_acks_.pop_back();
    throw;
  }
  if (!sent) {
    pending_acks_.back().set_value(PubAck{rec.seq, Timestamp::wall(0), true});
    pending_acks_.pop_back();
  }
  return fut;
}

PubAck BrokerClient::publish(const SignalRecord& rec, Duration timeout) {
  auto fut = publish_async(rec);
  if (fut.wait_for(timeout) != std::future_status::ready) {
    throw Error(ErrorCode::TimeoutExpired, name_ + ": no ack for seq " + std::to_string(rec.seq));
  }
  return fut.get();
}

std::optional<SignalRecord> BrokerClient::receive(Duration timeout) {
  std::unique_lock lock(mutex_);
  inbox_cv_.wait_for(lock, timeout, [this] { return !inbox_.empty() || closed_; });
  if (inbox_.empty()) {
    if (closed_) throw Error(ErrorCode::SessionClosed, name_ + ": session closed");
    return std::nullopt;
  }
  SignalRecord rec = std::move(inbox_.front());
  inbox_.pop_front();
  space_cv_.notify_one();
  return rec;
}

void BrokerClient::on_frame(wire::Frame&& f) {
  std::unique_lock lock(mutex_);
  if (f.op == "msg") {
    space_cv_.wait(lock, [this] { return inbox_.size() < inbox_capacity_ || closed_; });
    if (closed_) return;
    inbox_.push_back(f.record());
    inbox_cv_.notify_one();
  } else if (f.op == "ack" && !pending_acks_.empty()) {
    pending_acks_.front().set_value(PubAck{f.seq.value_or(0), Timestamp::wall(f.ts.value_or(0)), false});
    pending_acks_.pop_front();
  } else if (f.op == "suback" && !pending_subs_.empty()) {
    pending_subs_.front().set_value();
    pending_subs_.pop_front();
  } else if (f.op == "error" && !pending_subs_.empty() && f.error == "BadPattern") {
    pending_subs_.front().set_exception(
        std::make_exception_ptr(Error(ErrorCode::BadPattern, "rejected by broker")));
    pending_subs_.pop_front();
  }
}

void BrokerClient::on_closed() {
  std::lock_guard lock(mutex_);
  closed_ = true;
  auto gone = std::make_exception_ptr(Error(ErrorCode::SessionClosed, name_ + ": session closed"));
  for (auto& p : pending_acks_) p.set_exception(gone);
  for (auto& p : pending_subs_) p.set_exception(gone);
  pending_acks_.clear();
  pending_subs_.clear();
  inbox_cv_.notify_all();
  space_cv_.notify_all();
}

void BrokerClient::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
    space_cv_.notify_all();
    inbox_cv_.notify_all();
  }
  conn_->close(true);
  on_closed();
}

bool BrokerClient::open() const {
  std::lock_guard lock(mutex_);
  return !closed_ && conn_->open();
}

}  // namespace smb::broker
