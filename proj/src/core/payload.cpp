#include "core/payload.hpp"

#include <cstring>
#include <map>
#include <mutex>
#include <vector>

#include "core/error.hpp"

namespace xrpipe {

namespace {

std::atomic<std::uint64_t> g_next_alloc_id{1};
std::atomic<std::uint64_t> g_copy_count{0};

/// Bounded free-list of payload buffers keyed by exact size. Frame pipelines
/// recycle a handful of sizes; reusing buffers keeps large munmap/mmap
/// traffic out of the steady state.
class BufferPool {
 public:
  static BufferPool& instance() {
    static BufferPool pool;
    return pool;
  }

  std::unique_ptr<std::uint8_t[]> acquire(std::size_t len) {
    {
      std::lock_guard lk(mu_);
      auto it = free_.find(len);
      if (it != free_.end() && !it->second.empty()) {
        auto buf = std::move(it->second.back());
        it->second.pop_back();
        pooled_bytes_ -= len;
        std::memset(buf.get(), 0, len);
        return buf;
      }
    }
    // value-initialized: zeroed
    return std::unique_ptr<std::uint8_t[]>(new std::uint8_t[len]());
  }

  void release(std::unique_ptr<std::uint8_t[]> buf, std::size_t len) {
    std::lock_guard lk(mu_);
    auto& list = free_[len];
    if (list.size() >= kMaxPerSize || pooled_bytes_ + len > kMaxPooledBytes)
      return;  // let it free
    list.push_back(std::move(buf));
    pooled_bytes_ += len;
  }

  void clear() {
    std::lock_guard lk(mu_);
    free_.clear();
    pooled_bytes_ = 0;
  }

 private:
  static constexpr std::size_t kMaxPerSize = 16;
  static constexpr std::size_t kMaxPooledBytes = 512ull << 20;

  std::mutex mu_;
  std::map<std::size_t, std::vector<std::unique_ptr<std::uint8_t[]>>> free_;
  std::size_t pooled_bytes_ = 0;
};

}  // namespace

Payload::Payload(std::unique_ptr<std::uint8_t[]> data, std::size_t len)
    : data_(std::move(data)),
      len_(len),
      alloc_id_(g_next_alloc_id.fetch_add(1, std::memory_order_relaxed)) {}

Payload::~Payload() {
  if (data_) BufferPool::instance().release(std::move(data_), len_);
}

PayloadPtr Payload::alloc(std::size_t len) {
  if (len == 0) raise(Errc::invalid_size, "payload length must be positive");
  return PayloadPtr(new Payload(BufferPool::instance().acquire(len), len));
}

PayloadPtr Payload::from_bytes(const std::uint8_t* data, std::size_t len) {
  auto p = alloc(len);
  std::memcpy(p->data_.get(), data, len);
  return p;
}

PayloadPtr Payload::clone() const {
  auto p = alloc(len_);
  std::memcpy(p->data_.get(), data_.get(), len_);
  g_copy_count.fetch_add(1, std::memory_order_relaxed);
  return p;
}

std::uint8_t* Payload::mutable_data() {
  if (sealed())
    raise(Errc::immutable_payload, "payload already sent; clone to mutate");
  return data_.get();
}

std::uint64_t Payload::copy_count() noexcept {
  return g_copy_count.load(std::memory_order_relaxed);
}

namespace detail {
void payload_pool_clear() { BufferPool::instance().clear(); }
}  // namespace detail

}  // namespace xrpipe
