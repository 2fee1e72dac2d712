#pragma once

#include <chrono>
#include <memory>

#include "core/message.hpp"
#include "remote/socket.hpp"
#include "remote/wire.hpp"

namespace xrpipe::remote {

struct LinkConfig {
  CodecId codec = CodecId::raw;
  int connect_attempts = 10;
  std::chrono::milliseconds connect_retry_interval{100};
  std::chrono::milliseconds connect_timeout{500};     // per attempt
  std::chrono::milliseconds accept_timeout{10'000};   // wait for the peer
  std::chrono::milliseconds handshake_timeout{5'000};
};

enum class LinkRecv { msg, closed };

/// One reliable, ordered link carrying serialized messages for one edge.
/// Both directions handshake with HELLO before any DATA; a BYE (or EOF)
/// reports closed after all in-flight DATA has been delivered. Sending and
/// receiving may run on different threads.
class RemoteLink {
 public:
  RemoteLink();
  RemoteLink(RemoteLink&&) noexcept;
  RemoteLink& operator=(RemoteLink&&) noexcept;
  ~RemoteLink();

  /// Connect side; retries while the peer is still coming up. Raises
  /// CONNECT_REFUSED / CONNECT_TIMEOUT past the retry budget.
  static RemoteLink connect(const Addr& addr, LinkConfig cfg = {});

  /// Serializes with the link codec. Returns bytes put on the wire.
  std::size_t send(const Message& m);

  /// In-order receive; stamps the message's sent_ns with the local arrival
  /// time (the origin stamp is another host's clock).
  LinkRecv recv(Message& out);

  /// Graceful close: BYE + write shutdown. recv may keep draining.
  void close() noexcept;

  /// Wakes any blocked send/recv (shutdown path); safe from other threads.
  void hard_close() noexcept;

  bool connected() const;
  CodecId codec() const;
  bool valid() const { return impl_ != nullptr; }

 private:
  friend class LinkAcceptor;
  RemoteLink(Socket sock, LinkConfig cfg, bool accept_side);

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Listen side of a link; binds immediately so connect retries can land.
class LinkAcceptor {
 public:
  explicit LinkAcceptor(const Addr& addr) : acceptor_(addr) {}

  /// Accepts one peer and completes the handshake.
  RemoteLink accept(LinkConfig cfg = {});

  std::uint16_t port() const { return acceptor_.port(); }

 private:
  Acceptor acceptor_;
};

}  // namespace xrpipe::remote
