#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/message.hpp"
#include "remote/rle.hpp"
#include "remote/wire.hpp"
#include "support/test_util.hpp"

using namespace xrpipe;
using namespace xrpipe::remote;
using test_util::errc_of;

using Bytes = std::vector<std::uint8_t>;

namespace {

WireHeader random_header(std::mt19937_64& rng) {
  static constexpr MsgType types[] = {MsgType::data, MsgType::hello,
                                      MsgType::bye};
  static constexpr CodecId codecs[] = {CodecId::raw, CodecId::rle};
  static constexpr PixelFormat formats[] = {
      PixelFormat::rgb8, PixelFormat::gray8, PixelFormat::opaque};
  WireHeader h;
  h.msg_type = types[rng() % 3];
  h.codec = codecs[rng() % 2];
  h.pixel_format = formats[rng() % 3];
  h.seq = rng();
  h.created_ns = rng();
  h.width = static_cast<std::uint32_t>(rng());
  h.height = static_cast<std::uint32_t>(rng());
  h.payload_len = static_cast<std::uint32_t>(rng());
  return h;
}

Message random_message(std::mt19937_64& rng, PixelFormat format) {
  const std::uint32_t w = 1 + rng() % 48;
  const std::uint32_t h = 1 + rng() % 32;
  Message m;
  if (format == PixelFormat::opaque) {
    m.frame = {w, h, PixelFormat::opaque};
    m.payload = Payload::alloc(1 + rng() % 4096);
  } else {
    m.frame = {w, h, format};
    m.payload = Payload::alloc(m.frame.payload_size());
  }
  auto* data = m.payload->mutable_data();
  std::uint8_t value = static_cast<std::uint8_t>(rng());
  for (std::size_t i = 0; i < m.payload->len(); ++i) {
    if (rng() % 4 == 0) value = static_cast<std::uint8_t>(rng());
    data[i] = value;  // runs mixed with noise
  }
  m.seq = rng();
  m.created_ns = static_cast<std::int64_t>(rng() >> 1);
  m.sent_ns = m.created_ns + 5;
  return m;
}

}  // namespace

TEST_CASE("the 36-byte DATA header example is bit-exact") {
  WireHeader h;
  h.msg_type = MsgType::data;
  h.codec = CodecId::raw;
  h.pixel_format = PixelFormat::rgb8;
  h.seq = 1;
  h.created_ns = 0;
  h.width = 1280;
  h.height = 720;
  h.payload_len = 2'764'800;

  const Bytes expected = {
      0x58, 0x52, 0x53, 0x50,                          // "XRSP"
      0x01,                                            // version
      0x00,                                            // DATA
      0x00,                                            // RAW
      0x00,                                            // RGB8
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01,  // seq = 1
      0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,  // created_ns = 0
      0x00, 0x00, 0x05, 0x00,                          // width = 1280
      0x00, 0x00, 0x02, 0xD0,                          // height = 720
      0x00, 0x2A, 0x30, 0x00,                          // payload_len
  };
  const auto encoded = encode_header(h);
  CHECK(Bytes(encoded.begin(), encoded.end()) == expected);
  CHECK(decode_header(encoded) == h);
}

TEST_CASE("the HELLO control header is version + type + opaque, rest zero") {
  const auto encoded = encode_header(control_header(MsgType::hello));
  Bytes expected = {0x58, 0x52, 0x53, 0x50, 0x01, 0x01, 0x00, 0xFF};
  expected.resize(36, 0x00);
  CHECK(Bytes(encoded.begin(), encoded.end()) == expected);
}

TEST_CASE("encode/decode identity over randomized headers") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const WireHeader h = random_header(rng);
    CHECK(decode_header(encode_header(h)) == h);
  }
}

TEST_CASE("decode rejects bad frames") {
  auto good = encode_header(control_header(MsgType::hello));

  SUBCASE("bad magic") {
    auto bytes = good;
    bytes[0] = 'A';
    bytes[1] = 'B';
    bytes[2] = 'C';
    bytes[3] = 'D';
    CHECK(errc_of([&] { decode_header(bytes); }) == Errc::bad_magic);
  }
  SUBCASE("unknown version") {
    auto bytes = good;
    bytes[4] = 9;
    CHECK(errc_of([&] { decode_header(bytes); }) == Errc::unsupported_version);
  }
  SUBCASE("unknown msg_type") {
    auto bytes = good;
    bytes[5] = 7;
    CHECK(errc_of([&] { decode_header(bytes); }) == Errc::malformed_header);
  }
  SUBCASE("unknown codec") {
    auto bytes = good;
    bytes[6] = 9;
    CHECK(errc_of([&] { decode_header(bytes); }) == Errc::malformed_header);
  }
  SUBCASE("unknown pixel format") {
    auto bytes = good;
    bytes[7] = 3;
    CHECK(errc_of([&] { decode_header(bytes); }) == Errc::malformed_header);
  }
  SUBCASE("short buffer") {
    CHECK(errc_of([&] {
            decode_header(std::span(good.data(), 35));
          }) == Errc::truncated);
  }
}

TEST_CASE("serializing a 1x1 gray8 payload") {
  Message m = make_frame({1, 1, PixelFormat::gray8}, 0, 9);
  const Bytes bytes = serialize_message(m, CodecId::raw);
  REQUIRE(bytes.size() == 37);
  const WireHeader h = decode_header(bytes);
  CHECK(h.payload_len == 1);
  CHECK(bytes[36] == 9);
}

TEST_CASE("constant 720p frame over rle serializes to 36+21686 bytes") {
  Message m = make_frame({1280, 720, PixelFormat::rgb8}, 0, 7);
  const Bytes bytes = serialize_message(m, CodecId::rle);
  CHECK(bytes.size() == 36 + 21'686);
}

TEST_CASE("serialize/deserialize reproduces every transmitted field") {
  std::mt19937_64 rng(11);
  static constexpr PixelFormat formats[] = {
      PixelFormat::rgb8, PixelFormat::gray8, PixelFormat::opaque};
  static constexpr CodecId codecs[] = {CodecId::raw, CodecId::rle};
  for (int i = 0; i < 240; ++i) {
    const Message m = random_message(rng, formats[i % 3]);
    const CodecId codec = codecs[(i / 3) % 2];
    const Bytes bytes = serialize_message(m, codec);
    const Message back = deserialize_message(bytes);
    CHECK(back.seq == m.seq);
    CHECK(back.created_ns == m.created_ns);
    CHECK(back.frame == m.frame);
    REQUIRE(back.payload->len() == m.payload->len());
    CHECK(std::equal(m.payload->data(), m.payload->data() + m.payload->len(),
                     back.payload->data()));
    CHECK(back.alloc_id() != m.alloc_id());  // the wire crossing copies
    CHECK(back.sent_ns == 0);                // sent_ns is not transmitted
  }
}

TEST_CASE("deserialize rejects truncated payloads") {
  Message m = make_frame({2, 2, PixelFormat::gray8}, 0, 1);
  Bytes bytes = serialize_message(m, CodecId::raw);
  bytes.resize(36 + 2);  // header claims 4 payload bytes
  CHECK(errc_of([&] { deserialize_message(bytes); }) == Errc::truncated);
}

TEST_CASE("deserialize rejects a decompressed size mismatch") {
  WireHeader h;
  h.msg_type = MsgType::data;
  h.codec = CodecId::rle;
  h.pixel_format = PixelFormat::rgb8;
  h.width = 1280;
  h.height = 720;
  h.payload_len = 2;
  const auto header = encode_header(h);
  Bytes bytes(header.begin(), header.end());
  bytes.push_back(1);  // one run of a single byte: decompresses to 1 byte
  bytes.push_back(7);
  CHECK(errc_of([&] { deserialize_message(bytes); }) == Errc::size_mismatch);
}

TEST_CASE("deserialize rejects control frames") {
  const auto hello = encode_header(control_header(MsgType::hello));
  CHECK(errc_of([&] { deserialize_message(hello); }) ==
        Errc::malformed_header);
}
