#pragma once

#include <cstdint>

#include "core/frame.hpp"
#include "core/payload.hpp"

namespace xrpipe {

/// A timestamped, sequence-numbered frame. Copying a Message shares the
/// payload (cheap handle copy); the bytes themselves never move locally.
struct Message {
  std::uint64_t seq = 0;
  std::int64_t created_ns = 0;  // stamped at the origin kernel
  std::int64_t sent_ns = 0;     // stamped at channel send; host-local
  FrameSpec frame;
  PayloadPtr payload;

  std::uint64_t alloc_id() const { return payload ? payload->alloc_id() : 0; }
};

/// Synthetic frame with every payload byte set to `fill` (camera stand-in).
Message make_frame(const FrameSpec& spec, std::uint64_t seq, std::uint8_t fill);

}  // namespace xrpipe
