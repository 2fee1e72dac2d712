#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace xrpipe::remote {

struct Addr {
  std::string host;
  std::uint16_t port = 0;

  /// Parses "host:port" with a decimal port. Raises INVALID_ARGUMENT.
  static Addr parse(std::string_view s);
  std::string str() const { return host + ":" + std::to_string(port); }
};

/// Thin RAII wrapper over a connected TCP stream socket (TCP_NODELAY set).
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd);
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  /// One connection attempt with a timeout. Raises CONNECT_REFUSED or
  /// CONNECT_TIMEOUT.
  static Socket connect(const Addr& addr, std::chrono::milliseconds timeout);

  void send_all(const void* data, std::size_t len);

  /// Fills exactly `len` bytes. Returns false on clean EOF before the first
  /// byte; raises IO_ERROR on mid-read EOF or failure.
  bool recv_all(void* data, std::size_t len);

  /// Like recv_all but bounded; raises CONNECT_TIMEOUT when the deadline
  /// passes first (handshake reads).
  bool recv_all_timeout(void* data, std::size_t len,
                        std::chrono::milliseconds timeout);

  /// Thread-safe wakeup of blocked reads/writes on this socket.
  void shutdown_both() noexcept;
  void shutdown_write() noexcept;

  bool valid() const { return fd_ >= 0; }

 private:
  int fd_ = -1;
};

/// Bound+listening TCP endpoint; accepts one peer at a time.
class Acceptor {
 public:
  explicit Acceptor(const Addr& addr);
  Acceptor(Acceptor&&) noexcept;
  Acceptor& operator=(Acceptor&&) noexcept;
  ~Acceptor();

  Socket accept(std::chrono::milliseconds timeout);

  /// Actual bound port (useful when constructed with port 0).
  std::uint16_t port() const { return port_; }

  void close() noexcept;

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace xrpipe::remote
