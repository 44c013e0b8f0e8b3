#include "smb/wire/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "smb/error.hpp"

namespace smb::wire {

namespace {

sockaddr_in resolve(const HostPort& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "cannot resolve host '" + addr.host + "'");
  }
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

int poll_ms(Duration d) {
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
  if (ms < 0) return 0;
  if (ms == 0 && d > Duration::zero()) return 1;
  return static_cast<int>(std::min<long long>(ms, 1 << 30));
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

HostPort HostPort::parse(std::string_view text) {
  auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::InvalidArgument, "expected host:port, got '" + std::string(text) + "'");
  }
  unsigned port = 0;
  auto digits = text.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "bad port in '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

std::string HostPort::str() const { return host + ":" + std::to_string(port); }

void Fd::reset() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpStream::TcpStream(Fd fd) : fd_(std::move(fd)) {
  if (fd_.valid()) set_nodelay(fd_.get());
}

TcpStream TcpStream::connect(const HostPort& addr, Duration timeout) {
  sockaddr_in sa = resolve(addr);
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd.valid()) throw Error(ErrorCode::ConnectionRefused, std::strerror(errno));

  int flags = ::fcntl(fd.get(), F_GETFL, 0);
  ::fcntl(fd.get(), F_SETFL, flags | O_NONBLOCK);
  int rc = ::connect(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa));
  if (rc != 0 && errno != EINPROGRESS) {
    throw Error(ErrorCode::ConnectionRefused, addr.str() + ": " + std::strerror(errno));
  }
  if (rc != 0) {
    pollfd p{fd.get(), POLLOUT, 0};
    int n = ::poll(&p, 1, poll_ms(timeout));
    if (n <= 0) throw Error(ErrorCode::ConnectionRefused, addr.str() + ": connect timed out");
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) throw Error(ErrorCode::ConnectionRefused, addr.str() + ": " + std::strerror(err));
  }
  ::fcntl(fd.get(), F_SETFL, flags);
  return TcpStream(std::move(fd));
}

void TcpStream::write_line(std::string_view line) {
  std::string data;
  data.reserve(line.size() + 1);
  data.append(line);
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd_.get(), data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::SessionClosed, std::string("write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> TcpStream::read_line(std::optional<Duration> timeout) {
  auto deadline = std::chrono::steady_clock::now() + timeout.value_or(Duration::zero());
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (timeout) {
      auto left = deadline - std::chrono::steady_clock::now();
      pollfd p{fd_.get(), POLLIN, 0};
      int n = ::poll(&p, 1, poll_ms(std::chrono::duration_cast<Duration>(left)));
      if (n == 0) throw Error(ErrorCode::TimeoutExpired, "no complete line before timeout");
      if (n < 0 && errno != EINTR) return std::nullopt;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd_.get(), chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void TcpStream::shutdown() {
  if (fd_.valid()) ::shutdown(fd_.get(), SHUT_RDWR);
}

TcpListener TcpListener::bind(const HostPort& addr, int backlog) {
  sockaddr_in sa = resolve(addr);
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd.valid()) throw Error(ErrorCode::AddressInUse, std::strerror(errno));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    throw Error(ErrorCode::AddressInUse, addr.str() + ": " + std::strerror(errno));
  }
  if (::listen(fd.get(), backlog) != 0) {
    throw Error(ErrorCode::AddressInUse, addr.str() + ": " + std::strerror(errno));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &len);

  TcpListener l;
  l.fd_ = std::move(fd);
  l.local_ = {addr.host, ntohs(bound.sin_port)};
  return l;
}

std::optional<TcpStream> TcpListener::accept(Duration timeout) {
  if (!fd_.valid()) return std::nullopt;
  pollfd p{fd_.get(), POLLIN, 0};
  int n = ::poll(&p, 1, poll_ms(timeout));
  if (n <= 0) return std::nullopt;
  int c = ::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC);
  if (c < 0) return std::nullopt;
  return TcpStream(Fd(c));
}

std::uint16_t pick_free_port() {
  auto l = TcpListener::bind({"127.0.0.1", 0});
  return l.local().port;
}

}  // namespace smb::wire
