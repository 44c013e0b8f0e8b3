#include "smb/broker/broker.hpp"

#include <spdlog/spdlog.h>

#include "smb/error.hpp"

namespace smb::broker {

using namespace std::chrono_literals;

void BrokerConfig::validate() const {
  if (max_clients < 1) throw Error(ErrorCode::InvalidArgument, "max_clients must be >= 1");
  if (queue_depth < 1) throw Error(ErrorCode::InvalidArgument, "queue_depth must be >= 1");
  profile.validate();
}

bool is_valid_pattern(std::string_view pattern) {
  if (pattern.size() >= 2 && pattern.substr(pattern.size() - 2) == "/*") {
    pattern.remove_suffix(1);  // keep the slash, it is part of the prefix
  }
  return is_valid_signal_name(pattern);
}

Subscription::Subscription(std::string pattern) : pattern_(std::move(pattern)) {
  if (!is_valid_pattern(pattern_)) {
    throw Error(ErrorCode::BadPattern, "'" + pattern_ + "' is neither a name nor a prefix/*");
  }
  if (pattern_.size() >= 2 && pattern_.ends_with("/*")) {
    prefix_ = pattern_.substr(0, pattern_.size() - 1);
  }
}

bool Subscription::matches(std::string_view topic) const {
  if (prefix_.empty()) return topic == pattern_;
  return topic.size() > prefix_.size() && topic.starts_with(prefix_);
}

Broker::Broker(BrokerConfig cfg) : cfg_(std::move(cfg)) {}

std::unique_ptr<Broker> Broker::serve(BrokerConfig cfg) {
  cfg.validate();
  std::unique_ptr<Broker> b(new Broker(std::move(cfg)));
  b->listener_ = wire::TcpListener::bind(b->cfg_.listen);
  b->address_ = b->listener_.local();
  b->acceptor_ = std::thread([raw = b.get()] { raw->accept_loop(); });
  spdlog::debug("broker listening on {}", b->address_.str());
  return b;
}

Broker::~Broker() { shutdown(false); }

void Broker::accept_loop() {
  while (!stopping_) {
    auto stream = listener_.accept(50ms);
    reap();
    if (!stream || stopping_) continue;
    try {
      admit(std::move(*stream));
    } catch (const std::exception& e) {
      spdlog::debug("broker: handshake failed: {}", e.what());
    }
  }
}

void Broker::admit(wire::TcpStream stream) {
  std::optional<wire::Frame> hello;
  try {
    if (auto line = stream.read_line(cfg_.handshake_timeout)) hello = wire::decode(*line);
  } catch (const Error&) {
  }
  if (!hello || hello->op != "hello" || !hello->client) {
    stream.write_line(wire::encode(wire::Frame::failure("expected hello")));
    stream.shutdown();
    return;
  }
  {
    std::shared_lock lock(sessions_mutex_);
    std::size_t live = 0;
    for (const auto& [id, s] : sessions_) live += s->dead ? 0 : 1;
    if (live >= cfg_.max_clients) {
      ++refused_;
      stream.write_line(wire::encode(wire::Frame::failure("max_clients")));
      stream.shutdown();
      return;
    }
  }

  auto session = std::make_shared<Session>();
  session->name = *hello->client;
  {
    std::unique_lock lock(sessions_mutex_);
    session->id = next_id_++;
  }
  // The leg's random stream depends only on the client's name.
  session->conn = std::make_unique<wire::Connection>(std::move(stream), "broker->" + session->name,
                                                     cfg_.queue_depth, cfg_.overflow);
  session->conn->attach(cfg_.profile);
  session->conn->send_now(wire::Frame::welcome(session->id));

  Session* raw = session.get();
  session->conn->start([this, raw](wire::Frame&& f) { on_frame(*raw, std::move(f)); },
                       [raw] { raw->dead = true; });
  std::unique_lock lock(sessions_mutex_);
  sessions_.emplace(session->id, std::move(session));
}

void Broker::on_frame(Session& s, wire::Frame&& f) {
  if (f.op == "pub") {
    if (!f.topic || !f.value || !f.ts || !f.seq) {
      s.conn->send(wire::Frame::failure("pub frame missing fields"));
      return;
    }
    ++published_;
    auto now = clock_.wall_now();
    route(f);
    s.conn->send(wire::Frame::pub_ack(*f.seq, now.nanos()));
    return;
  }
  if (f.op == "sub") {
    try {
      Subscription sub(f.topic.value_or(""));
      {
        std::unique_lock lock(sessions_mutex_);
        s.subs.push_back(sub);
      }
      s.conn->send(wire::Frame::suback(sub.pattern()));
    } catch (const Error&) {
      s.conn->send(wire::Frame::failure("BadPattern"));
    }
    return;
  }
  s.conn->send(wire::Frame::failure("unsupported op '" + f.op + "'"));
}

void Broker::route(const wire::Frame& pub) {
  wire::Frame msg = pub;
  msg.op = "msg";
  std::shared_lock lock(sessions_mutex_);
  for (auto& [id, target] : sessions_) {
    if (target->dead) continue;
    bool match = false;
    for (const auto& sub : target->subs) {
      if (sub.matches(*pub.topic)) {
        match = true;
        break;
      }
    }
    if (!match) continue;
    try {
      target->conn->send(msg, /*droppable=*/true);
      ++routed_;
    } catch (const Error&) {
      target->dead = true;  // disconnect overflow policy, or already gone
    }
  }
}

void Broker::reap() {
  std::vector<std::shared_ptr<Session>> dead;
  {
    std::unique_lock lock(sessions_mutex_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (it->second->dead) {
        dead.push_back(std::move(it->second));
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& s : dead) s->conn->close(false);
}

void Broker::shutdown(bool drain) {
  if (stopping_.exchange(true)) return;
  if (acceptor_.joinable()) acceptor_.join();
  listener_.close();
  std::map<std::uint64_t, std::shared_ptr<Session>> sessions;
  {
    std::unique_lock lock(sessions_mutex_);
    sessions.swap(sessions_);
  }
  for (auto& [id, s] : sessions) s->conn->close(drain && !s->dead);
}

BrokerStats Broker::stats() const {
  BrokerStats st;
  st.published = published_;
  st.routed = routed_;
  st.refused = refused_;
  std::shared_lock lock(sessions_mutex_);
  for (const auto& [id, s] : sessions_) st.clients += s->dead ? 0 : 1;
  return st;
}

}  // namespace smb::broker
