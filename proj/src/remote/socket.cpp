#include "remote/socket.hpp"

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

#include "core/error.hpp"

namespace xrpipe::remote {

namespace {

[[noreturn]] void raise_errno(Errc code, const std::string& what) {
  raise(code, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Addr& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  if (inet_pton(AF_INET, addr.host.c_str(), &sa.sin_addr) == 1) return sa;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(addr.host.c_str(), nullptr, &hints, &res) != 0 || !res)
    raise(Errc::invalid_argument, "cannot resolve host '" + addr.host + "'");
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

bool wait_fd(int fd, short events, std::chrono::milliseconds timeout) {
  pollfd p{fd, events, 0};
  for (;;) {
    const int r = ::poll(&p, 1, static_cast<int>(timeout.count()));
    if (r > 0) return true;
    if (r == 0) return false;
    if (errno != EINTR) raise_errno(Errc::io_error, "poll");
  }
}

}  // namespace

Addr Addr::parse(std::string_view s) {
  const auto colon = s.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size())
    raise(Errc::invalid_argument, "address must be host:port");
  const auto port_sv = s.substr(colon + 1);
  std::uint32_t port = 0;
  auto [p, ec] = std::from_chars(port_sv.data(), port_sv.data() + port_sv.size(), port);
  if (ec != std::errc() || p != port_sv.data() + port_sv.size() || port > 65535)
    raise(Errc::invalid_argument, "bad port in address");
  return Addr{std::string(s.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

Socket::Socket(int fd) : fd_(fd) { set_nodelay(fd_); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Socket::~Socket() {
  if (fd_ >= 0) ::close(fd_);
}

Socket Socket::connect(const Addr& addr, std::chrono::milliseconds timeout) {
  const sockaddr_in sa = resolve(addr);
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) raise_errno(Errc::io_error, "socket");

  const int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
  const int rc =
      ::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof(sa));
  if (rc != 0 && errno != EINPROGRESS) {
    const int saved = errno;
    ::close(fd);
    errno = saved;
    if (saved == ECONNREFUSED)
      raise_errno(Errc::connect_refused, "connect " + addr.str());
    raise_errno(Errc::io_error, "connect " + addr.str());
  }
  if (rc != 0) {
    if (!wait_fd(fd, POLLOUT, timeout)) {
      ::close(fd);
      raise(Errc::connect_timeout, "connect " + addr.str() + ": timed out");
    }
    int err = 0;
    socklen_t len = sizeof(err);
    ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
    if (err != 0) {
      ::close(fd);
      errno = err;
      if (err == ECONNREFUSED)
        raise_errno(Errc::connect_refused, "connect " + addr.str());
      raise_errno(Errc::io_error, "connect " + addr.str());
    }
  }
  ::fcntl(fd, F_SETFL, flags);
  return Socket(fd);
}

void Socket::send_all(const void* data, std::size_t len) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  while (len > 0) {
    const ssize_t n = ::send(fd_, p, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET)
        raise(Errc::link_closed, "peer closed the connection");
      raise_errno(Errc::io_error, "send");
    }
    p += n;
    len -= static_cast<std::size_t>(n);
  }
}

bool Socket::recv_all(void* data, std::size_t len) {
  auto* p = static_cast<std::uint8_t*>(data);
  std::size_t got = 0;
  while (got < len) {
    const ssize_t n = ::recv(fd_, p + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;  // clean EOF at a frame boundary
      raise(Errc::io_error, "connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) {
        if (got == 0) return false;
        raise(Errc::io_error, "connection reset mid-frame");
      }
      raise_errno(Errc::io_error, "recv");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

bool Socket::recv_all_timeout(void* data, std::size_t len,
                              std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  auto* p = static_cast<std::uint8_t*>(data);
  std::size_t got = 0;
  while (got < len) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0 || !wait_fd(fd_, POLLIN, left))
      raise(Errc::connect_timeout, "timed out waiting for peer");
    const ssize_t n = ::recv(fd_, p + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      raise(Errc::io_error, "connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      raise_errno(Errc::io_error, "recv");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

void Socket::shutdown_both() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void Socket::shutdown_write() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

Acceptor::Acceptor(const Addr& addr) {
  const sockaddr_in want = resolve(addr);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) raise_errno(Errc::io_error, "socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&want), sizeof(want)) != 0) {
    const int saved = errno;
    ::close(fd_);
    fd_ = -1;
    errno = saved;
    raise_errno(Errc::io_error, "bind " + addr.str());
  }
  if (::listen(fd_, 8) != 0) raise_errno(Errc::io_error, "listen");

  sockaddr_in got{};
  socklen_t len = sizeof(got);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&got), &len);
  port_ = ntohs(got.sin_port);
}

Acceptor::Acceptor(Acceptor&& other) noexcept
    : fd_(other.fd_), port_(other.port_) {
  other.fd_ = -1;
}

Acceptor& Acceptor::operator=(Acceptor&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    port_ = other.port_;
    other.fd_ = -1;
  }
  return *this;
}

Acceptor::~Acceptor() { close(); }

void Acceptor::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Acceptor::accept(std::chrono::milliseconds timeout) {
  if (!wait_fd(fd_, POLLIN, timeout))
    raise(Errc::connect_timeout, "accept: no peer arrived");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) raise_errno(Errc::io_error, "accept");
  return Socket(fd);
}

}  // namespace xrpipe::remote
