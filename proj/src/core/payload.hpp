#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>

namespace xrpipe {

class Payload;
using PayloadPtr = std::shared_ptr<Payload>;

/// A frame payload buffer with a process-unique allocation identity.
///
/// The alloc_id is assigned once per allocation and never reused within a
/// process run; it is the witness that a local transfer moved the handle and
/// not the bytes. Buffers come from a bounded free-list keyed by size, so a
/// steady-state pipeline allocates from the pool instead of the OS.
///
/// A payload becomes immutable (sealed) the first time it is sent on any
/// port. Kernels that need a mutated copy clone first; every clone is a real
/// byte copy and bumps the global copy counter.
class Payload {
 public:
  /// Fresh zero-initialized payload. len == 0 raises INVALID_SIZE.
  static PayloadPtr alloc(std::size_t len);

  /// Fresh payload holding a copy of the given bytes (ingress path; not
  /// counted as a payload copy).
  static PayloadPtr from_bytes(const std::uint8_t* data, std::size_t len);

  /// Byte-for-byte duplicate with a fresh alloc_id. Counted.
  PayloadPtr clone() const;

  std::uint64_t alloc_id() const noexcept { return alloc_id_; }
  std::size_t len() const noexcept { return len_; }
  const std::uint8_t* data() const noexcept { return data_.get(); }
  std::span<const std::uint8_t> bytes() const { return {data_.get(), len_}; }

  /// Writable view; raises IMMUTABLE_PAYLOAD once sealed.
  std::uint8_t* mutable_data();

  void seal() noexcept { sealed_.store(true, std::memory_order_release); }
  bool sealed() const noexcept { return sealed_.load(std::memory_order_acquire); }

  /// Total payload byte-copies performed in this process (clone and
  /// copy-channel traffic). Zero-copy paths never move it.
  static std::uint64_t copy_count() noexcept;

  ~Payload();

  Payload(const Payload&) = delete;
  Payload& operator=(const Payload&) = delete;

 private:
  Payload(std::unique_ptr<std::uint8_t[]> data, std::size_t len);

  std::unique_ptr<std::uint8_t[]> data_;
  std::size_t len_;
  std::uint64_t alloc_id_;
  std::atomic<bool> sealed_{false};
};

namespace detail {
/// Drops every pooled buffer (test hook; keeps alloc_ids monotonic).
void payload_pool_clear();
}  // namespace detail

}  // namespace xrpipe
