#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "smb/core/time.hpp"

namespace smb::wire {

struct HostPort {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Parses "host:port". Throws InvalidArgument.
  static HostPort parse(std::string_view text);
  [[nodiscard]] std::string str() const;

  friend bool operator==(const HostPort&, const HostPort&) = default;
};

/// Owning file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& o) noexcept : fd_(o.release()) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.release();
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  [[nodiscard]] int get() const { return fd_; }
  [[nodiscard]] bool valid() const { return fd_ >= 0; }
  int release() {
    int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset();

 private:
  int fd_ = -1;
};

/// Blocking TCP stream with line framing. One reader thread and one writer
/// thread may use it concurrently; shutdown() unblocks both.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(Fd fd);

  /// Throws ConnectionRefused (also on timeout).
  static TcpStream connect(const HostPort& addr, Duration timeout = std::chrono::seconds(5));

  /// Writes `line` plus '\n'. Throws SessionClosed.
  void write_line(std::string_view line);

  /// Next line without '\n'; nullopt on EOF or error. With a timeout,
  /// throws TimeoutExpired when nothing complete arrives in time.
  std::optional<std::string> read_line(std::optional<Duration> timeout = std::nullopt);

  void shutdown();
  [[nodiscard]] bool valid() const { return fd_.valid(); }

 private:
  Fd fd_;
  std::string buffer_;
};

class TcpListener {
 public:
  /// Port 0 picks an ephemeral port. Throws AddressInUse.
  static TcpListener bind(const HostPort& addr, int backlog = 128);

  /// Waits up to `timeout` for a connection.
  std::optional<TcpStream> accept(Duration timeout);

  [[nodiscard]] HostPort local() const { return local_; }
  void close() { fd_.reset(); }

 private:
  Fd fd_;
  HostPort local_;
};

/// Reserves a free loopback port by binding and releasing it.
std::uint16_t pick_free_port();

}  // namespace smb::wire
