#pragma once

#include <atomic>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "smb/netem/shaped_link.hpp"
#include "smb/wire/frame.hpp"
#include "smb/wire/socket.hpp"

namespace smb::wire {

/// A framed TCP connection: a reader thread decoding inbound frames and a
/// shaped outbound link writing encoded frames. The outbound link is the
/// per-peer send queue (capacity and overflow policy apply to it).
class Connection {
 public:
  using FrameHandler = std::function<void(Frame&&)>;
  using CloseHandler = std::function<void()>;

  Connection(TcpStream stream, std::string link_id,
             std::size_t capacity = std::numeric_limits<std::size_t>::max(),
             netem::OverflowPolicy policy = netem::OverflowPolicy::drop_oldest);
  ~Connection();

  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  /// Shapes the outbound direction. Throws AlreadyShaped.
  void attach(const netem::NetProfile& profile) { out_.attach(profile); }

  /// Starts the reader. `on_close` runs once when the peer goes away or
  /// the connection is closed locally.
  void start(FrameHandler on_frame, CloseHandler on_close);

  /// Queues a frame. Returns false when the loss model dropped it.
  /// Throws SessionClosed.
  bool send(const Frame& frame, bool droppable = false);

  /// Blocking write that bypasses the outbound queue; only for handshakes
  /// before start().
  void send_now(const Frame& frame) { stream_.write_line(encode(frame)); }
  /// Blocking read for handshakes before start(). Throws TimeoutExpired.
  std::optional<Frame> read_now(Duration timeout);

  void close(bool drain = false);
  [[nodiscard]] bool open() const { return open_.load(); }
  [[nodiscard]] netem::LinkStats stats() const { return out_.stats(); }
  [[nodiscard]] const std::string& id() const { return id_; }

 private:
  void read_loop();
  void notify_closed();

  std::string id_;
  TcpStream stream_;
  netem::ShapedLink out_;
  FrameHandler on_frame_;
  CloseHandler on_close_;
  std::once_flag closed_once_;
  std::atomic<bool> open_{true};
  std::thread reader_;
};

}  // namespace smb::wire
