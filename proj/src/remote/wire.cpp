#include "remote/wire.hpp"

#include <cstring>

#include "core/error.hpp"
#include "remote/rle.hpp"

namespace xrpipe::remote {

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
  put_u32(p, static_cast<std::uint32_t>(v >> 32));
  put_u32(p + 4, static_cast<std::uint32_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

std::uint64_t get_u64(const std::uint8_t* p) {
  return (static_cast<std::uint64_t>(get_u32(p)) << 32) | get_u32(p + 4);
}

}  // namespace

std::array<std::uint8_t, kWireHeaderSize> encode_header(const WireHeader& h) {
  std::array<std::uint8_t, kWireHeaderSize> out{};
  std::memcpy(out.data(), kWireMagic.data(), 4);
  out[4] = h.version;
  out[5] = static_cast<std::uint8_t>(h.msg_type);
  out[6] = static_cast<std::uint8_t>(h.codec);
  out[7] = static_cast<std::uint8_t>(h.pixel_format);
  put_u64(out.data() + 8, h.seq);
  put_u64(out.data() + 16, h.created_ns);
  put_u32(out.data() + 24, h.width);
  put_u32(out.data() + 28, h.height);
  put_u32(out.data() + 32, h.payload_len);
  return out;
}

WireHeader decode_header(std::span<const std::uint8_t> b) {
  if (b.size() < kWireHeaderSize)
    raise(Errc::truncated, "header needs 36 bytes");
  if (std::memcmp(b.data(), kWireMagic.data(), 4) != 0)
    raise(Errc::bad_magic, "bad magic");
  WireHeader h;
  h.version = b[4];
  if (h.version != kProtocolVersion)
    raise(Errc::unsupported_version,
          "protocol version " + std::to_string(h.version));
  if (b[5] > 2) raise(Errc::malformed_header, "unknown msg_type");
  h.msg_type = static_cast<MsgType>(b[5]);
  if (b[6] > 1) raise(Errc::malformed_header, "unknown codec");
  h.codec = static_cast<CodecId>(b[6]);
  if (b[7] != 0 && b[7] != 1 && b[7] != 255)
    raise(Errc::malformed_header, "unknown pixel_format");
  h.pixel_format = static_cast<PixelFormat>(b[7]);
  h.seq = get_u64(b.data() + 8);
  h.created_ns = get_u64(b.data() + 16);
  h.width = get_u32(b.data() + 24);
  h.height = get_u32(b.data() + 28);
  h.payload_len = get_u32(b.data() + 32);
  return h;
}

WireHeader control_header(MsgType type) {
  WireHeader h;
  h.msg_type = type;
  h.codec = CodecId::raw;
  h.pixel_format = PixelFormat::opaque;
  return h;
}

std::vector<std::uint8_t> serialize_message(const Message& m, CodecId codec) {
  std::span<const std::uint8_t> raw = m.payload->bytes();
  std::vector<std::uint8_t> compressed;
  std::span<const std::uint8_t> body = raw;
  if (codec == CodecId::rle) {
    compressed = rle_compress(raw);
    body = compressed;
  }

  WireHeader h;
  h.msg_type = MsgType::data;
  h.codec = codec;
  h.pixel_format = m.frame.format;
  h.seq = m.seq;
  h.created_ns = static_cast<std::uint64_t>(m.created_ns);
  h.width = m.frame.width;
  h.height = m.frame.height;
  h.payload_len = static_cast<std::uint32_t>(body.size());

  std::vector<std::uint8_t> out;
  out.reserve(kWireHeaderSize + body.size());
  const auto header = encode_header(h);
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Message assemble_data_message(const WireHeader& h,
                              std::span<const std::uint8_t> payload) {
  if (h.msg_type != MsgType::data)
    raise(Errc::malformed_header, "expected DATA frame");
  if (h.payload_len == 0)
    raise(Errc::malformed_header, "DATA frame without payload");
  if (payload.size() != h.payload_len)
    raise(Errc::truncated, "payload shorter than header claims");

  Message m;
  m.seq = h.seq;
  m.created_ns = static_cast<std::int64_t>(h.created_ns);
  m.frame = {h.width, h.height, h.pixel_format};

  if (h.codec == CodecId::raw) {
    if (m.frame.format != PixelFormat::opaque &&
        payload.size() != m.frame.payload_size())
      raise(Errc::size_mismatch, "payload length does not match frame spec");
    m.payload = Payload::from_bytes(payload.data(), payload.size());
  } else {
    const auto decompressed = rle_decompress(payload);
    if (m.frame.format != PixelFormat::opaque &&
        decompressed.size() != m.frame.payload_size())
      raise(Errc::size_mismatch,
            "decompressed length does not match frame spec");
    m.payload = Payload::from_bytes(decompressed.data(), decompressed.size());
  }
  return m;
}

Message deserialize_message(std::span<const std::uint8_t> bytes) {
  const WireHeader h = decode_header(bytes);
  if (bytes.size() < kWireHeaderSize + h.payload_len)
    raise(Errc::truncated, "payload shorter than header claims");
  return assemble_data_message(
      h, bytes.subspan(kWireHeaderSize, h.payload_len));
}

std::string_view to_string(CodecId c) {
  return c == CodecId::raw ? "raw" : "rle";
}

std::optional<CodecId> codec_from_string(std::string_view s) {
  if (s == "raw") return CodecId::raw;
  if (s == "rle") return CodecId::rle;
  return std::nullopt;
}

}  // namespace xrpipe::remote
