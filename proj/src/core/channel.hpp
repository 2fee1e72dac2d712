#pragma once

#include <cstdint>
#include <memory>
#include <stop_token>
#include <utility>

#include "core/message.hpp"

namespace xrpipe {

enum class OverflowPolicy : std::uint8_t {
  block = 0,        // sender waits for space (lossless)
  drop_oldest = 1,  // evict the oldest queued message (live-frame semantics)
};

enum class SyncMode : std::uint8_t {
  blocking = 0,      // gates kernel firing
  non_blocking = 1,  // latest-available sample, never gates
};

enum class SendStatus {
  accepted,
  accepted_with_drop,
  closed,       // every receiver is gone
  interrupted,  // stop requested while waiting for space
};

enum class RecvStatus {
  ok,
  empty,        // non-blocking receive on an empty queue
  closed,       // sender gone and queue drained
  interrupted,  // stop requested while waiting
};

namespace detail {
class ChannelCore;
struct Subscriber;
}  // namespace detail

class SendEndpoint;
class RecvEndpoint;
class ChannelHandle;
struct ChannelParts;
ChannelParts channel_create_with_handle(std::size_t capacity,
                                        OverflowPolicy policy);

/// Consuming end of a local channel. One consumer per endpoint; messages
/// arrive in FIFO order carrying the sender's payload handle unchanged.
class RecvEndpoint {
  friend ChannelParts channel_create_with_handle(std::size_t, OverflowPolicy);
  friend class SendEndpoint;

 public:
  RecvEndpoint() = default;
  RecvEndpoint(RecvEndpoint&&) noexcept;
  RecvEndpoint& operator=(RecvEndpoint&&) noexcept;
  RecvEndpoint(const RecvEndpoint&) = delete;
  RecvEndpoint& operator=(const RecvEndpoint&) = delete;
  ~RecvEndpoint();

  /// Blocking receive.
  RecvStatus recv(Message& out);
  /// Blocking receive that also wakes on stop request.
  RecvStatus recv(Message& out, std::stop_token st);
  /// Non-blocking receive: empty queue reports RecvStatus::empty.
  RecvStatus try_recv(Message& out);

  /// Latest-sample receive: pops everything queued, returns the newest and
  /// discards the rest (their count lands in `discarded`). Never waits.
  RecvStatus recv_latest(Message& out, std::size_t& discarded);

  bool ready() const;             // a message is queued
  bool closed_and_empty() const;  // no message will ever arrive

  enum class Wait { ready, closed, interrupted };
  Wait wait_ready(std::stop_token st) const;

  void close();
  bool valid() const { return core_ != nullptr; }

 private:
  RecvEndpoint(std::shared_ptr<detail::ChannelCore> core,
               std::shared_ptr<detail::Subscriber> sub);

  std::shared_ptr<detail::ChannelCore> core_;
  std::shared_ptr<detail::Subscriber> sub_;
};

/// Producing end of a local channel. Sending transfers the message by
/// handle: the payload is sealed and its bytes are never copied.
class SendEndpoint {
  friend ChannelParts channel_create_with_handle(std::size_t, OverflowPolicy);

 public:
  SendEndpoint() = default;
  SendEndpoint(SendEndpoint&&) noexcept;
  SendEndpoint& operator=(SendEndpoint&&) noexcept;
  SendEndpoint(const SendEndpoint&) = delete;
  SendEndpoint& operator=(const SendEndpoint&) = delete;
  ~SendEndpoint();

  /// Stamps sent_ns and enqueues. With a full BLOCK queue the call waits;
  /// with DROP_OLDEST it evicts and reports accepted_with_drop.
  SendStatus send(Message m);
  SendStatus send(Message m, std::stop_token st);

  /// Enqueue keeping the caller's sent_ns stamp (instrumented senders).
  SendStatus send_prestamped(Message m);
  SendStatus send_prestamped(Message m, std::stop_token st);

  /// Adds a consumer. Only valid before delivery starts; afterwards raises
  /// SUBSCRIPTION_CLOSED. All subscribers observe the same payload handles.
  RecvEndpoint subscribe();

  /// Freezes the subscriber set (also happens implicitly at first send).
  void start();

  std::uint64_t dropped_count() const;
  std::size_t max_depth() const;  // high-water mark over subscribers

  void close();
  bool valid() const { return core_ != nullptr; }

 private:
  explicit SendEndpoint(std::shared_ptr<detail::ChannelCore> core);

  std::shared_ptr<detail::ChannelCore> core_;
};

/// Bounded FIFO channel between one producer and (initially) one consumer.
/// capacity == 0 raises INVALID_CAPACITY.
std::pair<SendEndpoint, RecvEndpoint> channel_create(std::size_t capacity,
                                                     OverflowPolicy policy);

/// Monitoring/shutdown view of a channel; safe to use from any thread.
class ChannelHandle {
  friend ChannelParts channel_create_with_handle(std::size_t, OverflowPolicy);

 public:
  ChannelHandle() = default;

  /// Closes both sides and wakes every blocked sender/receiver.
  void hard_close();
  std::uint64_t dropped_count() const;
  std::size_t max_depth() const;

 private:
  std::shared_ptr<detail::ChannelCore> core_;
};

struct ChannelParts {
  SendEndpoint send;
  RecvEndpoint recv;
  ChannelHandle handle;
};

ChannelParts channel_create_with_handle(std::size_t capacity,
                                        OverflowPolicy policy);

/// Spec-named alias for SendEndpoint::subscribe().
inline RecvEndpoint fan_out_subscribe(SendEndpoint& s) { return s.subscribe(); }

}  // namespace xrpipe
