#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <thread>

#include "core/message.hpp"
#include "core/payload.hpp"
#include "support/test_util.hpp"

using namespace xrpipe;
using test_util::errc_of;

TEST_CASE("payload_alloc zero-initializes") {
  auto p = Payload::alloc(4);
  REQUIRE(p->len() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(p->data()[i] == 0);
  CHECK(p->alloc_id() != 0);
}

TEST_CASE("consecutive allocations get distinct ids") {
  auto a = Payload::alloc(16);
  auto b = Payload::alloc(16);
  CHECK(a->alloc_id() != b->alloc_id());
}

TEST_CASE("zero-length allocation is rejected") {
  CHECK(errc_of([] { Payload::alloc(0); }) == Errc::invalid_size);
}

TEST_CASE("alloc ids stay unique under concurrent allocation") {
  constexpr int kThreads = 4, kPerThread = 2000;
  std::vector<std::vector<std::uint64_t>> ids(kThreads);
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t)
    threads.emplace_back([&ids, t] {
      for (int i = 0; i < kPerThread; ++i)
        ids[t].push_back(Payload::alloc(8)->alloc_id());
    });
  for (auto& th : threads) th.join();
  std::set<std::uint64_t> all;
  for (const auto& batch : ids) all.insert(batch.begin(), batch.end());
  CHECK(all.size() == kThreads * kPerThread);
}

TEST_CASE("pool reuse still zero-initializes and renames") {
  std::uint64_t first_id = 0;
  {
    auto p = Payload::alloc(1 << 12);
    first_id = p->alloc_id();
    p->mutable_data()[100] = 0xab;
  }
  auto q = Payload::alloc(1 << 12);  // likely the pooled buffer
  CHECK(q->alloc_id() != first_id);
  CHECK(q->data()[100] == 0);
}

TEST_CASE("clone copies bytes, renames, and bumps the copy counter") {
  auto p = Payload::alloc(8);
  p->mutable_data()[3] = 42;
  const auto copies_before = Payload::copy_count();
  auto c = p->clone();
  CHECK(Payload::copy_count() == copies_before + 1);
  CHECK(c->alloc_id() != p->alloc_id());
  CHECK(c->len() == 8);
  CHECK(c->data()[3] == 42);
}

TEST_CASE("from_bytes is not counted as a payload copy") {
  const std::uint8_t raw[] = {1, 2, 3};
  const auto copies_before = Payload::copy_count();
  auto p = Payload::from_bytes(raw, 3);
  CHECK(Payload::copy_count() == copies_before);
  CHECK(p->data()[2] == 3);
}

TEST_CASE("sealed payloads refuse mutation") {
  auto p = Payload::alloc(4);
  p->seal();
  CHECK(errc_of([&] { p->mutable_data(); }) == Errc::immutable_payload);
  CHECK(p->data() != nullptr);  // reads stay fine
}

TEST_CASE("make_frame fills and sizes 720p rgb8") {
  const Message m = make_frame({1280, 720, PixelFormat::rgb8}, 0, 7);
  REQUIRE(m.payload->len() == 2'764'800);
  CHECK(m.payload->len() == m.frame.payload_size());
  CHECK(m.payload->data()[0] == 7);
  CHECK(m.payload->data()[2'764'799] == 7);
  CHECK(m.created_ns > 0);
  CHECK(m.seq == 0);
}

TEST_CASE("make_frame sizes 2160p rgb8") {
  const Message m = make_frame({3840, 2160, PixelFormat::rgb8}, 5, 0);
  CHECK(m.payload->len() == 24'883'200);
  CHECK(m.seq == 5);
}

TEST_CASE("make_frame 1x1 gray8") {
  const Message m = make_frame({1, 1, PixelFormat::gray8}, 0, 255);
  REQUIRE(m.payload->len() == 1);
  CHECK(m.payload->data()[0] == 255);
}

TEST_CASE("named resolutions map exactly") {
  const struct {
    const char* name;
    std::uint32_t w, h;
  } expected[] = {{"720p", 1280, 720},
                  {"1080p", 1920, 1080},
                  {"1440p", 2560, 1440},
                  {"2160p", 3840, 2160}};
  for (const auto& e : expected) {
    const auto res = parse_resolution(e.name);
    REQUIRE(res.has_value());
    CHECK(res->width == e.w);
    CHECK(res->height == e.h);
  }
  CHECK(parse_resolution("64x48")->width == 64);
  CHECK(!parse_resolution("garbage").has_value());
}
