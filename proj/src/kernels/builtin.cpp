#include "kernels/builtin.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

#include "core/clock.hpp"
#include "core/error.hpp"
#include "core/hash.hpp"
#include "core/log.hpp"

namespace xrpipe::kernels {

namespace {

// fill syntax: "constant:N", "gradient", "random:SEED"
void parse_fill(const std::string& s, SourceParams& p) {
  const auto colon = s.find(':');
  const std::string mode = s.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? std::string() : s.substr(colon + 1);
  auto parse_u64 = [&](const std::string& a) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || ptr != a.data() + a.size())
      raise(Errc::invalid_argument, "bad fill argument '" + a + "'");
    return v;
  };
  if (mode == "constant") {
    p.fill = FillMode::constant;
    const std::uint64_t v = arg.empty() ? 0 : parse_u64(arg);
    if (v > 255) raise(Errc::invalid_argument, "fill byte out of range");
    p.fill_value = static_cast<std::uint8_t>(v);
  } else if (mode == "gradient") {
    p.fill = FillMode::gradient;
  } else if (mode == "random") {
    p.fill = FillMode::random;
    p.seed = arg.empty() ? 0 : parse_u64(arg);
  } else {
    raise(Errc::invalid_argument, "unknown fill mode '" + mode + "'");
  }
}

}  // namespace

SourceParams SourceParams::from_map(const ParamMap& params) {
  params.allow_only(
      {"resolution", "width", "height", "format", "fps", "frames", "fill"});
  SourceParams p;
  if (params.has("resolution")) {
    const auto res = parse_resolution(params.get_string("resolution", ""));
    if (!res) raise(Errc::invalid_argument, "bad resolution");
    p.frame.width = res->width;
    p.frame.height = res->height;
  } else {
    p.frame.width = static_cast<std::uint32_t>(params.get_int("width", 0));
    p.frame.height = static_cast<std::uint32_t>(params.get_int("height", 0));
  }
  if (p.frame.width == 0 || p.frame.height == 0)
    raise(Errc::invalid_argument, "source needs a resolution or width/height");
  const auto fmt = pixel_format_from_string(params.get_string("format", "rgb8"));
  if (!fmt || *fmt == PixelFormat::opaque)
    raise(Errc::invalid_argument, "source format must be rgb8 or gray8");
  p.frame.format = *fmt;
  p.fps = params.get_double("fps", 0);
  if (p.fps < 0) raise(Errc::invalid_argument, "fps must be >= 0");
  const auto frames = params.get_int("frames", 0);
  if (frames < 0) raise(Errc::invalid_argument, "frames must be >= 0");
  p.budget = static_cast<std::uint64_t>(frames);
  parse_fill(params.get_string("fill", "constant:0"), p);
  return p;
}

SyntheticFrameSource::SyntheticFrameSource(SourceParams params)
    : params_(std::move(params)) {}

std::vector<PortDecl> SyntheticFrameSource::ports() const {
  return {{"out", Direction::out}};
}

void SyntheticFrameSource::fill_payload(std::uint8_t* data, std::size_t len,
                                        const SourceParams& params,
                                        std::uint64_t seq) {
  switch (params.fill) {
    case FillMode::constant:
      std::memset(data, params.fill_value, len);
      break;
    case FillMode::gradient:
      for (std::size_t i = 0; i < len; ++i)
        data[i] = static_cast<std::uint8_t>((i + seq) & 0xff);
      break;
    case FillMode::random: {
      // Per-frame stream keyed by (seed, seq): reproducible and
      // independent of emission history.
      SplitMix64 rng(params.seed + seq * 0x9e3779b97f4a7c15ull);
      std::size_t i = 0;
      for (; i + 8 <= len; i += 8) {
        const std::uint64_t w = rng.next();
        std::memcpy(data + i, &w, 8);
      }
      if (i < len) {
        const std::uint64_t w = rng.next();
        std::memcpy(data + i, &w, len - i);
      }
      break;
    }
  }
}

StepStatus SyntheticFrameSource::step(StepIo& io) {
  if (params_.budget != 0 && next_seq_ >= params_.budget)
    return StepStatus::completed;

  if (params_.fps > 0) {
    const auto period_ns =
        static_cast<std::int64_t>(1e9 / params_.fps);
    if (next_deadline_ns_ == 0) next_deadline_ns_ = now_ns();
    if (!sleep_until_ns(next_deadline_ns_, io.stop()))
      return StepStatus::completed;  // stop requested mid-pace
    // Late frames shift the schedule instead of bursting to catch up.
    next_deadline_ns_ = std::max(now_ns(), next_deadline_ns_) + period_ns;
  }

  const std::uint64_t seq = next_seq_++;
  Message m;
  m.seq = seq;
  m.frame = params_.frame;
  m.payload = Payload::alloc(params_.frame.payload_size());
  fill_payload(m.payload->mutable_data(), m.payload->len(), params_, seq);
  m.created_ns = now_ns();
  io.emit("out", std::move(m));
  return StepStatus::ok;
}

std::vector<PortDecl> Grayscale::ports() const {
  return {{"in", Direction::in}, {"out", Direction::out}};
}

StepStatus Grayscale::step(StepIo& io) {
  auto in = io.take("in");
  if (!in) return StepStatus::ok;
  if (in->frame.format != PixelFormat::rgb8)
    raise(Errc::format_mismatch,
          "Grayscale needs rgb8 input, got " +
              std::string(to_string(in->frame.format)));

  Message out;
  out.seq = in->seq;
  out.created_ns = in->created_ns;
  out.frame = {in->frame.width, in->frame.height, PixelFormat::gray8};
  out.payload = Payload::alloc(out.frame.payload_size());

  const std::uint8_t* src = in->payload->data();
  std::uint8_t* dst = out.payload->mutable_data();
  const std::size_t pixels = in->frame.pixel_count();
  for (std::size_t i = 0; i < pixels; ++i) {
    const unsigned r = src[3 * i], g = src[3 * i + 1], b = src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>((r + g + b) / 3);
  }
  io.emit("out", std::move(out));
  return StepStatus::ok;
}

std::vector<PortDecl> Passthrough::ports() const {
  return {{"in", Direction::in}, {"out", Direction::out}};
}

StepStatus Passthrough::step(StepIo& io) {
  if (auto in = io.take("in")) io.emit("out", std::move(*in));
  return StepStatus::ok;
}

std::vector<PortDecl> Combiner::ports() const {
  return {{"a", Direction::in}, {"b", Direction::in}, {"out", Direction::out}};
}

StepStatus Combiner::step(StepIo& io) {
  auto a = io.take("a");
  if (!a) return StepStatus::ok;  // gating input absent: nothing to emit
  auto b = io.take("b");

  Record rec;
  rec.a_seq = a->seq;
  rec.b_present = b.has_value();
  if (b) rec.b_seq = b->seq;
  records_.push_back(rec);

  io.emit("out", std::move(*a));
  return StepStatus::ok;
}

LatencySink::LatencySink(std::string dump_path)
    : dump_path_(std::move(dump_path)) {}

std::vector<PortDecl> LatencySink::ports() const {
  return {{"in", Direction::in}};
}

StepStatus LatencySink::step(StepIo& io) {
  auto in = io.take("in");
  if (!in) return StepStatus::ok;

  LatencyRecord rec;
  rec.seq = in->seq;
  rec.created_ns = in->created_ns;
  rec.sent_ns = in->sent_ns;
  rec.arrival_ns = now_ns();
  rec.alloc_id = in->alloc_id();

  if (last_seq_ && in->seq != *last_seq_ + 1) ++seq_gaps_;
  last_seq_ = in->seq;
  ++count_;
  sum_e2e_ms_ += static_cast<double>(rec.e2e_ns()) / 1e6;
  if (records_.size() < kMaxRecords) records_.push_back(rec);

  if (!dump_path_.empty())
    dump_lines_.push_back(
        {in->seq, in->payload->len(),
         fnv1a64(in->payload->data(), in->payload->len())});
  return StepStatus::ok;
}

double LatencySink::mean_e2e_ms() const {
  return count_ == 0 ? 0.0 : sum_e2e_ms_ / static_cast<double>(count_);
}

void LatencySink::finalize() {
  if (dump_path_.empty()) return;
  std::ofstream out(dump_path_, std::ios::trunc);
  if (!out) {
    // finalize runs on shutdown paths; report instead of throwing
    XRP_LOG_ERROR("cannot write sink dump '", dump_path_, "'");
    return;
  }
  char buf[64];
  for (const auto& line : dump_lines_) {
    std::snprintf(buf, sizeof(buf), "%llu,%zu,%016llx\n",
                  static_cast<unsigned long long>(line.seq), line.len,
                  static_cast<unsigned long long>(line.hash));
    out << buf;
  }
}

}  // namespace xrpipe::kernels
