#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "core/message.hpp"

namespace xrpipe::remote {

enum class MsgType : std::uint8_t { data = 0, hello = 1, bye = 2 };

enum class CodecId : std::uint8_t {
  raw = 0,  // identity
  rle = 1,  // lossless byte-level run-length encoding
};

inline constexpr std::size_t kWireHeaderSize = 36;
inline constexpr std::array<std::uint8_t, 4> kWireMagic{'X', 'R', 'S', 'P'};
inline constexpr std::uint8_t kProtocolVersion = 1;

/// Fixed 36-byte frame header. All multi-byte integers are big-endian.
/// Layout: magic(4) version(1) msg_type(1) codec(1) pixel_format(1)
///         seq(8) created_ns(8) width(4) height(4) payload_len(4)
struct WireHeader {
  std::uint8_t version = kProtocolVersion;
  MsgType msg_type = MsgType::data;
  CodecId codec = CodecId::raw;
  PixelFormat pixel_format = PixelFormat::opaque;
  std::uint64_t seq = 0;
  std::uint64_t created_ns = 0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t payload_len = 0;  // length of the (possibly compressed) payload

  bool operator==(const WireHeader&) const = default;
};

std::array<std::uint8_t, kWireHeaderSize> encode_header(const WireHeader& h);

/// Raises BAD_MAGIC, UNSUPPORTED_VERSION, MALFORMED_HEADER, or TRUNCATED
/// (fewer than 36 bytes).
WireHeader decode_header(std::span<const std::uint8_t> bytes);

/// Header with the version byte set and everything else zero/defaulted;
/// control frames (HELLO/BYE) carry no payload and OPAQUE pixel format.
WireHeader control_header(MsgType type);

/// header ++ codec(payload). sent_ns is host-local and never transmitted.
std::vector<std::uint8_t> serialize_message(const Message& m, CodecId codec);

/// Inverse of serialize_message for DATA frames. The payload gets a fresh
/// alloc_id (a network crossing necessarily copies). Raises TRUNCATED when
/// payload bytes are missing and SIZE_MISMATCH when the decompressed length
/// does not match the frame spec.
Message deserialize_message(std::span<const std::uint8_t> bytes);

/// Builds the Message for an already-split DATA frame (header + payload
/// bytes); shared by deserialize_message and the link receive path.
Message assemble_data_message(const WireHeader& h,
                              std::span<const std::uint8_t> payload);

std::string_view to_string(CodecId c);
std::optional<CodecId> codec_from_string(std::string_view s);

}  // namespace xrpipe::remote
