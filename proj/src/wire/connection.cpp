#include "smb/wire/connection.hpp"

#include <spdlog/spdlog.h>

#include "smb/error.hpp"

namespace smb::wire {

Connection::Connection(TcpStream stream, std::string link_id, std::size_t capacity,
                       netem::OverflowPolicy policy)
    : id_(std::move(link_id)),
      stream_(std::move(stream)),
      out_(id_, [this](std::string&& line) { stream_.write_line(line); }, capacity, policy) {
  out_.on_failure([this] {
    open_ = false;
    stream_.shutdown();
  });
}

Connection::~Connection() {
  close(false);
}

void Connection::start(FrameHandler on_frame, CloseHandler on_close) {
  on_frame_ = std::move(on_frame);
  on_close_ = std::move(on_close);
  reader_ = std::thread([this] { read_loop(); });
}

bool Connection::send(const Frame& frame, bool droppable) {
  if (!open_) throw Error(ErrorCode::SessionClosed, "connection '" + id_ + "' is closed");
  return out_.send(encode(frame), droppable);
}

std::optional<Frame> Connection::read_now(Duration timeout) {
  auto line = stream_.read_line(timeout);
  if (!line) return std::nullopt;
  return decode(*line);
}

void Connection::read_loop() {
  while (auto line = stream_.read_line()) {
    if (line->empty()) continue;
    Frame f;
    try {
      f = decode(*line);
    } catch (const Error& e) {
      spdlog::warn("{}: dropping malformed frame ({})", id_, e.what());
      continue;
    }
    try {
      on_frame_(std::move(f));
    } catch (const std::exception& e) {
      spdlog::warn("{}: frame handler failed: {}", id_, e.what());
    }
  }
  open_ = false;
  notify_closed();
}

void Connection::notify_closed() {
  std::call_once(closed_once_, [this] {
    if (on_close_) on_close_();
  });
}

void Connection::close(bool drain) {
  out_.close(drain);
  open_ = false;
  stream_.shutdown();
  if (reader_.joinable()) {
    if (reader_.get_id() == std::this_thread::get_id()) {
      reader_.detach();
    } else {
      reader_.join();
    }
  }
}

}  // namespace smb::wire
