#include "core/channel.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <vector>

#include "core/clock.hpp"
#include "core/error.hpp"

namespace xrpipe {

namespace detail {

struct Subscriber {
  std::deque<Message> queue;
  std::size_t capacity = 0;
  OverflowPolicy policy = OverflowPolicy::block;
  bool open = true;
  std::size_t max_depth = 0;
  std::condition_variable_any cv;  // receiver waits for data
};

class ChannelCore {
 public:
  ChannelCore(std::size_t capacity, OverflowPolicy policy)
      : capacity_(capacity), policy_(policy) {}

  std::shared_ptr<Subscriber> add_subscriber() {
    std::lock_guard lk(mu_);
    if (started_)
      raise(Errc::subscription_closed,
            "channel already delivering; subscriptions are fixed before run");
    auto sub = std::make_shared<Subscriber>();
    sub->capacity = capacity_;
    sub->policy = policy_;
    subs_.push_back(sub);
    return sub;
  }

  void start() {
    std::lock_guard lk(mu_);
    started_ = true;
  }

  SendStatus send(Message m, const std::stop_token* st) {
    std::unique_lock lk(mu_);
    started_ = true;
    if (m.payload) m.payload->seal();
    bool dropped = false;
    bool delivered = false;
    const std::size_t n = subs_.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto& sub = *subs_[i];
      if (!sub.open) continue;
      if (sub.queue.size() >= sub.capacity) {
        if (sub.policy == OverflowPolicy::drop_oldest) {
          sub.queue.pop_front();
          dropped_.fetch_add(1, std::memory_order_relaxed);
          dropped = true;
        } else {
          // wait for the receiver to make room
          const bool ok = wait_for_space(lk, sub, st);
          if (!ok) {
            if (st && st->stop_requested()) return SendStatus::interrupted;
            continue;  // subscriber closed while we waited
          }
        }
      }
      const bool last = (i + 1 == n);
      sub.queue.push_back(last ? std::move(m) : m);
      sub.max_depth = std::max(sub.max_depth, sub.queue.size());
      sub.cv.notify_one();
      delivered = true;
    }
    if (!delivered) return SendStatus::closed;
    return dropped ? SendStatus::accepted_with_drop : SendStatus::accepted;
  }

  RecvStatus recv(Subscriber& sub, Message& out, bool blocking,
                  const std::stop_token* st) {
    std::unique_lock lk(mu_);
    for (;;) {
      if (!sub.queue.empty()) {
        out = std::move(sub.queue.front());
        sub.queue.pop_front();
        space_cv_.notify_all();
        return RecvStatus::ok;
      }
      if (!sender_open_ || !sub.open) return RecvStatus::closed;
      if (!blocking) return RecvStatus::empty;
      if (st) {
        sub.cv.wait(lk, *st, [&] { return wake_recv(sub); });
        if (st->stop_requested() && sub.queue.empty())
          return RecvStatus::interrupted;
      } else {
        sub.cv.wait(lk, [&] { return wake_recv(sub); });
      }
    }
  }

  RecvStatus recv_latest(Subscriber& sub, Message& out, std::size_t& discarded) {
    std::unique_lock lk(mu_);
    discarded = 0;
    if (sub.queue.empty())
      return (!sender_open_ || !sub.open) ? RecvStatus::closed
                                          : RecvStatus::empty;
    discarded = sub.queue.size() - 1;
    out = std::move(sub.queue.back());
    sub.queue.clear();
    space_cv_.notify_all();
    return RecvStatus::ok;
  }

  bool ready(const Subscriber& sub) const {
    std::lock_guard lk(mu_);
    return !sub.queue.empty();
  }

  bool closed_and_empty(const Subscriber& sub) const {
    std::lock_guard lk(mu_);
    return sub.queue.empty() && (!sender_open_ || !sub.open);
  }

  RecvEndpoint::Wait wait_ready(Subscriber& sub, std::stop_token st) const {
    std::unique_lock lk(mu_);
    sub.cv.wait(lk, st, [&] { return wake_recv(sub); });
    if (!sub.queue.empty()) return RecvEndpoint::Wait::ready;
    if (!sender_open_ || !sub.open) return RecvEndpoint::Wait::closed;
    return RecvEndpoint::Wait::interrupted;
  }

  void close_sender() {
    std::lock_guard lk(mu_);
    sender_open_ = false;
    for (auto& sub : subs_) sub->cv.notify_all();
  }

  void close_subscriber(Subscriber& sub) {
    std::lock_guard lk(mu_);
    sub.open = false;
    sub.queue.clear();
    sub.cv.notify_all();
    space_cv_.notify_all();
  }

  /// Force-close everything and wake every waiter (shutdown path).
  void hard_close() {
    std::lock_guard lk(mu_);
    sender_open_ = false;
    for (auto& sub : subs_) {
      sub->open = false;
      sub->cv.notify_all();
    }
    space_cv_.notify_all();
  }

  std::uint64_t dropped_count() const {
    return dropped_.load(std::memory_order_relaxed);
  }

  std::size_t max_depth() const {
    std::lock_guard lk(mu_);
    std::size_t d = 0;
    for (const auto& sub : subs_) d = std::max(d, sub->max_depth);
    return d;
  }

 private:
  bool wake_recv(const Subscriber& sub) const {
    return !sub.queue.empty() || !sender_open_ || !sub.open;
  }

  // Returns true when there is room in an open subscriber queue.
  bool wait_for_space(std::unique_lock<std::mutex>& lk, Subscriber& sub,
                      const std::stop_token* st) {
    auto ok = [&] { return sub.queue.size() < sub.capacity || !sub.open; };
    if (st) {
      space_cv_.wait(lk, *st, ok);
      if (st->stop_requested() && !ok()) return false;
    } else {
      space_cv_.wait(lk, ok);
    }
    return sub.open;
  }

  mutable std::mutex mu_;
  std::condition_variable_any space_cv_;  // senders wait for room
  std::vector<std::shared_ptr<Subscriber>> subs_;
  std::size_t capacity_;
  OverflowPolicy policy_;
  bool sender_open_ = true;
  bool started_ = false;
  std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace detail

// --- RecvEndpoint ---

RecvEndpoint::RecvEndpoint(std::shared_ptr<detail::ChannelCore> core,
                           std::shared_ptr<detail::Subscriber> sub)
    : core_(std::move(core)), sub_(std::move(sub)) {}

RecvEndpoint::RecvEndpoint(RecvEndpoint&&) noexcept = default;
RecvEndpoint& RecvEndpoint::operator=(RecvEndpoint&&) noexcept = default;

RecvEndpoint::~RecvEndpoint() { close(); }

void RecvEndpoint::close() {
  if (core_ && sub_) core_->close_subscriber(*sub_);
  core_.reset();
  sub_.reset();
}

RecvStatus RecvEndpoint::recv(Message& out) {
  return core_->recv(*sub_, out, /*blocking=*/true, nullptr);
}

RecvStatus RecvEndpoint::recv(Message& out, std::stop_token st) {
  return core_->recv(*sub_, out, /*blocking=*/true, &st);
}

RecvStatus RecvEndpoint::try_recv(Message& out) {
  return core_->recv(*sub_, out, /*blocking=*/false, nullptr);
}

RecvStatus RecvEndpoint::recv_latest(Message& out, std::size_t& discarded) {
  return core_->recv_latest(*sub_, out, discarded);
}

bool RecvEndpoint::ready() const { return core_->ready(*sub_); }

bool RecvEndpoint::closed_and_empty() const {
  return core_->closed_and_empty(*sub_);
}

RecvEndpoint::Wait RecvEndpoint::wait_ready(std::stop_token st) const {
  return core_->wait_ready(*sub_, std::move(st));
}

// --- SendEndpoint ---

SendEndpoint::SendEndpoint(std::shared_ptr<detail::ChannelCore> core)
    : core_(std::move(core)) {}

SendEndpoint::SendEndpoint(SendEndpoint&&) noexcept = default;
SendEndpoint& SendEndpoint::operator=(SendEndpoint&&) noexcept = default;

SendEndpoint::~SendEndpoint() { close(); }

void SendEndpoint::close() {
  if (core_) core_->close_sender();
  core_.reset();
}

SendStatus SendEndpoint::send(Message m) {
  m.sent_ns = now_ns();
  return core_->send(std::move(m), nullptr);
}

SendStatus SendEndpoint::send(Message m, std::stop_token st) {
  m.sent_ns = now_ns();
  return core_->send(std::move(m), &st);
}

SendStatus SendEndpoint::send_prestamped(Message m) {
  return core_->send(std::move(m), nullptr);
}

SendStatus SendEndpoint::send_prestamped(Message m, std::stop_token st) {
  return core_->send(std::move(m), &st);
}

RecvEndpoint SendEndpoint::subscribe() {
  return RecvEndpoint(core_, core_->add_subscriber());
}

void SendEndpoint::start() { core_->start(); }

std::uint64_t SendEndpoint::dropped_count() const {
  return core_->dropped_count();
}

std::size_t SendEndpoint::max_depth() const { return core_->max_depth(); }

std::pair<SendEndpoint, RecvEndpoint> channel_create(std::size_t capacity,
                                                     OverflowPolicy policy) {
  auto parts = channel_create_with_handle(capacity, policy);
  return {std::move(parts.send), std::move(parts.recv)};
}

void ChannelHandle::hard_close() {
  if (core_) core_->hard_close();
}

std::uint64_t ChannelHandle::dropped_count() const {
  return core_ ? core_->dropped_count() : 0;
}

std::size_t ChannelHandle::max_depth() const {
  return core_ ? core_->max_depth() : 0;
}

ChannelParts channel_create_with_handle(std::size_t capacity,
                                        OverflowPolicy policy) {
  if (capacity == 0)
    raise(Errc::invalid_capacity, "channel capacity must be >= 1");
  auto core = std::make_shared<detail::ChannelCore>(capacity, policy);
  auto sub = core->add_subscriber();
  ChannelParts parts;
  parts.send = SendEndpoint(core);
  parts.recv = RecvEndpoint(core, std::move(sub));
  parts.handle.core_ = std::move(core);
  return parts;
}

}  // namespace xrpipe
