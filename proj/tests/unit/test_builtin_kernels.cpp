#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "core/hash.hpp"
#include "kernels/builtin.hpp"
#include "support/test_util.hpp"

using namespace xrpipe;
using namespace xrpipe::kernels;
using test_util::errc_of;

namespace {

SourceParams tiny_source(FillMode fill, std::uint64_t budget,
                         std::uint64_t seed = 0) {
  SourceParams p;
  p.frame = {8, 8, PixelFormat::rgb8};
  p.budget = budget;
  p.fill = fill;
  p.fill_value = 7;
  p.seed = seed;
  return p;
}

Message step_once(Kernel& k, Message in, const char* port = "in") {
  StepIo io;
  io.provide(port, std::move(in));
  REQUIRE(k.step(io) == StepStatus::ok);
  REQUIRE(io.emitted().size() == 1);
  return std::move(io.emitted().front().second);
}

Message rgb_pixels(std::initializer_list<std::uint8_t> bytes) {
  Message m = make_frame(
      {static_cast<std::uint32_t>(bytes.size() / 3), 1, PixelFormat::rgb8}, 0,
      0);
  std::size_t i = 0;
  for (const auto b : bytes) m.payload->mutable_data()[i++] = b;
  return m;
}

}  // namespace

TEST_CASE("source emits increasing seqs with identical constant fill") {
  SyntheticFrameSource src(tiny_source(FillMode::constant, 0));
  StepIo io1, io2;
  REQUIRE(src.step(io1) == StepStatus::ok);
  REQUIRE(src.step(io2) == StepStatus::ok);
  const Message& a = io1.emitted().front().second;
  const Message& b = io2.emitted().front().second;
  CHECK(a.seq == 0);
  CHECK(b.seq == 1);
  CHECK(std::equal(a.payload->data(), a.payload->data() + a.payload->len(),
                   b.payload->data()));
  CHECK(a.payload->data()[0] == 7);
}

TEST_CASE("seeded random fill is reproducible across instances") {
  SyntheticFrameSource one(tiny_source(FillMode::random, 4, 42));
  SyntheticFrameSource two(tiny_source(FillMode::random, 4, 42));
  for (int i = 0; i < 4; ++i) {
    StepIo io1, io2;
    REQUIRE(one.step(io1) == StepStatus::ok);
    REQUIRE(two.step(io2) == StepStatus::ok);
    const auto& a = io1.emitted().front().second;
    const auto& b = io2.emitted().front().second;
    CHECK(fnv1a64(a.payload->data(), a.payload->len()) ==
          fnv1a64(b.payload->data(), b.payload->len()));
  }
  SyntheticFrameSource same(tiny_source(FillMode::random, 1, 42));
  SyntheticFrameSource other(tiny_source(FillMode::random, 1, 43));
  StepIo io1, io3;
  REQUIRE(same.step(io1) == StepStatus::ok);
  REQUIRE(other.step(io3) == StepStatus::ok);
  CHECK(fnv1a64(io1.emitted().front().second.payload->data(), 192) !=
        fnv1a64(io3.emitted().front().second.payload->data(), 192));
}

TEST_CASE("budget exhausts exactly") {
  SyntheticFrameSource src(tiny_source(FillMode::gradient, 10));
  int emitted = 0;
  for (;;) {
    StepIo io;
    if (src.step(io) == StepStatus::completed) break;
    ++emitted;
    REQUIRE(emitted <= 10);
  }
  CHECK(emitted == 10);
  CHECK(src.emitted() == 10);
  StepIo io;
  CHECK(src.step(io) == StepStatus::completed);  // stays completed
}

TEST_CASE("grayscale averages per pixel with floor") {
  Grayscale gray;
  const Message out =
      step_once(gray, rgb_pixels({255, 255, 255, 10, 20, 30, 0, 0, 1}));
  REQUIRE(out.frame.format == PixelFormat::gray8);
  REQUIRE(out.payload->len() == 3);
  CHECK(out.payload->data()[0] == 255);
  CHECK(out.payload->data()[1] == 20);
  CHECK(out.payload->data()[2] == 0);
}

TEST_CASE("grayscale keeps geometry, seq, and created_ns") {
  Grayscale gray;
  Message in = make_frame({6, 4, PixelFormat::rgb8}, 9, 100);
  in.seq = 9;
  const auto created = in.created_ns;
  const Message out = step_once(gray, std::move(in));
  CHECK(out.frame.width == 6);
  CHECK(out.frame.height == 4);
  CHECK(out.payload->len() == 24);
  CHECK(out.seq == 9);
  CHECK(out.created_ns == created);
}

TEST_CASE("grayscale output stays within the pixel min/max") {
  std::mt19937 rng(7);
  SourceParams params = tiny_source(FillMode::random, 1, rng());
  SyntheticFrameSource src(params);
  StepIo io;
  REQUIRE(src.step(io) == StepStatus::ok);
  Message in = std::move(io.emitted().front().second);
  const std::uint8_t* rgb = in.payload->data();
  const std::size_t pixels = in.frame.pixel_count();

  Grayscale gray;
  const Message out = step_once(gray, std::move(in));
  REQUIRE(out.payload->len() == pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::uint8_t lo =
        std::min({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
    const std::uint8_t hi =
        std::max({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
    REQUIRE(out.payload->data()[i] >= lo);
    REQUIRE(out.payload->data()[i] <= hi);
  }
}

TEST_CASE("grayscale rejects non-rgb8 input") {
  Grayscale gray;
  StepIo io;
  io.provide("in", make_frame({2, 2, PixelFormat::gray8}, 0, 0));
  CHECK(errc_of([&] { gray.step(io); }) == Errc::format_mismatch);
}

TEST_CASE("passthrough emits the message unchanged") {
  Passthrough pass;
  Message in = make_frame({3, 3, PixelFormat::rgb8}, 4, 11);
  in.seq = 4;
  const auto id = in.alloc_id();
  const Message out = step_once(pass, std::move(in));
  CHECK(out.seq == 4);
  CHECK(out.alloc_id() == id);  // zero-copy witness
  CHECK(out.payload->data()[5] == 11);
}

TEST_CASE("combiner records the sampled b") {
  Combiner comb;
  SUBCASE("b absent") {
    StepIo io;
    io.provide("a", make_frame({2, 2, PixelFormat::rgb8}, 0, 1));
    REQUIRE(comb.step(io) == StepStatus::ok);
    REQUIRE(io.emitted().size() == 1);
    REQUIRE(comb.records().size() == 1);
    CHECK_FALSE(comb.records().back().b_present);
  }
  SUBCASE("b present carries its seq") {
    StepIo io;
    Message a = make_frame({2, 2, PixelFormat::rgb8}, 3, 1);
    a.seq = 3;
    Message b = make_frame({2, 2, PixelFormat::rgb8}, 17, 2);
    b.seq = 17;
    io.provide("a", std::move(a));
    io.provide("b", std::move(b));
    REQUIRE(comb.step(io) == StepStatus::ok);
    REQUIRE(comb.records().size() == 1);
    CHECK(comb.records().back().b_present);
    CHECK(comb.records().back().b_seq == 17);
    CHECK(comb.records().back().a_seq == 3);
  }
  SUBCASE("a absent means no output") {
    StepIo io;
    REQUIRE(comb.step(io) == StepStatus::ok);
    CHECK(io.emitted().empty());
    CHECK(comb.records().empty());
  }
}

TEST_CASE("combiner output shares a's payload") {
  Combiner comb;
  StepIo io;
  Message a = make_frame({2, 2, PixelFormat::rgb8}, 0, 5);
  const auto id = a.alloc_id();
  io.provide("a", std::move(a));
  io.provide("b", make_frame({2, 2, PixelFormat::rgb8}, 0, 6));
  REQUIRE(comb.step(io) == StepStatus::ok);
  CHECK(io.emitted().front().second.alloc_id() == id);
}

TEST_CASE("latency sink records arrivals and counts gaps") {
  LatencySink sink;
  auto push = [&](std::uint64_t seq) {
    Message m = make_frame({2, 2, PixelFormat::gray8}, seq, 0);
    m.seq = seq;
    m.sent_ns = m.created_ns;
    StepIo io;
    io.provide("in", std::move(m));
    sink.step(io);
  };
  push(0);
  push(1);
  push(5);  // gap
  CHECK(sink.count() == 3);
  CHECK(sink.records().size() == 3);
  CHECK(sink.seq_gaps() == 1);
  for (const auto& r : sink.records()) {
    CHECK(r.arrival_ns >= r.created_ns);
    CHECK(r.e2e_ns() >= 0);
  }
}

TEST_CASE("sink dump writes seq,len,hash lines") {
  test_util::TempDir tmp;
  const std::string path = tmp.file("dump.csv");
  {
    LatencySink sink(path);
    Message m = make_frame({2, 1, PixelFormat::gray8}, 0, 0xee);
    const auto hash = fnv1a64(m.payload->data(), m.payload->len());
    StepIo io;
    io.provide("in", std::move(m));
    sink.step(io);
    sink.finalize();
    char expect[64];
    std::snprintf(expect, sizeof(expect), "0,2,%016llx\n",
                  static_cast<unsigned long long>(hash));
    CHECK(test_util::read_file(path) == expect);
  }
}

TEST_CASE("source params parse from a param map") {
  ParamMap params;
  params.set("resolution", std::string("720p"));
  params.set("fill", std::string("random:42"));
  params.set("frames", std::int64_t{1000});
  params.set("fps", std::int64_t{30});
  const SourceParams p = SourceParams::from_map(params);
  CHECK(p.frame.width == 1280);
  CHECK(p.frame.height == 720);
  CHECK(p.fill == FillMode::random);
  CHECK(p.seed == 42);
  CHECK(p.budget == 1000);
  CHECK(p.fps == 30);

  ParamMap bad;
  bad.set("resolution", std::string("720p"));
  bad.set("bogus", std::int64_t{1});
  CHECK(errc_of([&] { SourceParams::from_map(bad); }) ==
        Errc::invalid_argument);
}
