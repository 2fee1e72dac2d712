#include "core/message.hpp"

#include <cstring>

#include "core/clock.hpp"
#include "core/error.hpp"

namespace xrpipe {

Message make_frame(const FrameSpec& spec, std::uint64_t seq, std::uint8_t fill) {
  const std::size_t len = spec.payload_size();
  if (len == 0)
    raise(Errc::invalid_argument, "frame spec has no payload size");
  Message m;
  m.seq = seq;
  m.frame = spec;
  m.payload = Payload::alloc(len);
  std::memset(m.payload->mutable_data(), fill, len);
  m.created_ns = now_ns();
  return m;
}

}  // namespace xrpipe
