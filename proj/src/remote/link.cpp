#include "remote/link.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include "core/clock.hpp"
#include "core/error.hpp"
#include "core/log.hpp"

namespace xrpipe::remote {

struct RemoteLink::Impl {
  Socket sock;
  LinkConfig cfg;
  std::atomic<bool> connected{false};
  bool bye_sent = false;
  std::mutex send_mu;
  std::mutex recv_mu;
  std::vector<std::uint8_t> recv_buf;

  Impl(Socket s, LinkConfig c) : sock(std::move(s)), cfg(c) {}

  void send_control(MsgType type) {
    const auto bytes = encode_header(control_header(type));
    std::lock_guard lk(send_mu);
    sock.send_all(bytes.data(), bytes.size());
  }
};

RemoteLink::RemoteLink() = default;
RemoteLink::RemoteLink(RemoteLink&&) noexcept = default;
RemoteLink& RemoteLink::operator=(RemoteLink&&) noexcept = default;
RemoteLink::~RemoteLink() = default;

RemoteLink::RemoteLink(Socket sock, LinkConfig cfg, bool accept_side)
    : impl_(std::make_unique<Impl>(std::move(sock), cfg)) {
  // Both sides send HELLO then wait for the peer's. 36 bytes fit in the
  // socket buffer, so send-first cannot deadlock.
  const auto hello = encode_header(control_header(MsgType::hello));
  impl_->sock.send_all(hello.data(), hello.size());

  std::uint8_t buf[kWireHeaderSize];
  if (!impl_->sock.recv_all_timeout(buf, sizeof(buf), cfg.handshake_timeout))
    raise(Errc::protocol_violation, "peer closed during handshake");
  const WireHeader h = decode_header(buf);  // checks magic and version
  if (h.msg_type != MsgType::hello) {
    impl_->sock.shutdown_both();
    raise(Errc::protocol_violation, h.msg_type == MsgType::data
                                        ? "DATA before HELLO"
                                        : "BYE before HELLO");
  }
  impl_->connected.store(true);
  XRP_LOG_DEBUG("link handshake complete (",
                accept_side ? "accept" : "connect", " side)");
}

RemoteLink RemoteLink::connect(const Addr& addr, LinkConfig cfg) {
  Errc last = Errc::connect_timeout;
  std::string last_msg = "no attempts made";
  for (int attempt = 0; attempt < cfg.connect_attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(cfg.connect_retry_interval);
    try {
      Socket s = Socket::connect(addr, cfg.connect_timeout);
      return RemoteLink(std::move(s), cfg, /*accept_side=*/false);
    } catch (const Error& e) {
      if (e.code() != Errc::connect_refused &&
          e.code() != Errc::connect_timeout)
        throw;  // handshake and protocol errors are not retryable
      last = e.code();
      last_msg = e.what();
    }
  }
  raise(last, last_msg + " (after " + std::to_string(cfg.connect_attempts) +
                  " attempts)");
}

RemoteLink LinkAcceptor::accept(LinkConfig cfg) {
  Socket s = acceptor_.accept(cfg.accept_timeout);
  return RemoteLink(std::move(s), cfg, /*accept_side=*/true);
}

std::size_t RemoteLink::send(const Message& m) {
  if (!impl_ || !impl_->connected.load())
    raise(Errc::link_closed, "link is closed");
  const auto bytes = serialize_message(m, impl_->cfg.codec);
  std::lock_guard lk(impl_->send_mu);
  impl_->sock.send_all(bytes.data(), bytes.size());
  return bytes.size();
}

LinkRecv RemoteLink::recv(Message& out) {
  if (!impl_) raise(Errc::link_closed, "link is closed");
  std::lock_guard lk(impl_->recv_mu);
  std::uint8_t hdr[kWireHeaderSize];
  if (!impl_->sock.recv_all(hdr, sizeof(hdr))) return LinkRecv::closed;  // EOF
  const WireHeader h = decode_header(hdr);
  switch (h.msg_type) {
    case MsgType::bye:
      return LinkRecv::closed;
    case MsgType::hello:
      impl_->sock.shutdown_both();
      raise(Errc::protocol_violation, "unexpected HELLO after handshake");
    case MsgType::data:
      break;
  }
  impl_->recv_buf.resize(h.payload_len);
  if (h.payload_len > 0 &&
      !impl_->sock.recv_all(impl_->recv_buf.data(), impl_->recv_buf.size()))
    raise(Errc::io_error, "connection closed mid-frame");
  out = assemble_data_message(h, impl_->recv_buf);
  out.sent_ns = now_ns();  // local arrival stamp
  return LinkRecv::msg;
}

void RemoteLink::close() noexcept {
  if (!impl_) return;
  try {
    if (impl_->connected.load() && !impl_->bye_sent) {
      impl_->bye_sent = true;
      impl_->send_control(MsgType::bye);
    }
  } catch (...) {
    // peer may already be gone
  }
  impl_->sock.shutdown_write();
}

void RemoteLink::hard_close() noexcept {
  if (!impl_) return;
  impl_->connected.store(false);
  impl_->sock.shutdown_both();
}

bool RemoteLink::connected() const {
  return impl_ && impl_->connected.load();
}

CodecId RemoteLink::codec() const {
  return impl_ ? impl_->cfg.codec : CodecId::raw;
}

}  // namespace xrpipe::remote
