#include "bench/harness.hpp"

#include <thread>

#include "core/clock.hpp"
#include "core/error.hpp"
#include "core/log.hpp"
#include "kernels/builtin.hpp"
#include "remote/link.hpp"

namespace xrpipe::bench {

using kernels::FillMode;
using kernels::LatencySink;
using kernels::SourceParams;
using kernels::SyntheticFrameSource;

namespace {

constexpr std::uint8_t kFillByte = 7;

SourceParams bench_source_params(const std::string& resolution,
                                 std::uint64_t frames) {
  const auto res = parse_resolution(resolution);
  if (!res) raise(Errc::invalid_argument, "bad resolution '" + resolution + "'");
  SourceParams p;
  p.frame = {res->width, res->height, PixelFormat::rgb8};
  p.fps = 0;  // unpaced: the channel provides backpressure
  p.budget = frames + kWarmupFrames;
  p.fill = FillMode::constant;
  p.fill_value = kFillByte;
  return p;
}

void check_args(const std::vector<std::string>& resolutions,
                std::uint64_t frames) {
  if (frames == 0) raise(Errc::invalid_argument, "frames must be >= 1");
  if (resolutions.empty())
    raise(Errc::invalid_argument, "need at least one resolution");
}

/// Drives one source step and hands the emitted frame to `deliver`.
/// Returns false once the budget is exhausted.
template <typename Deliver>
bool pump_source(SyntheticFrameSource& source, std::uint64_t& next_seq,
                 Deliver&& deliver) {
  StepIo io;
  if (source.step(io) == StepStatus::completed) return false;
  Message m = std::move(io.emitted().front().second);
  m.seq = next_seq++;
  return deliver(std::move(m));
}

}  // namespace

std::string_view to_string(ChannelKind k) {
  return k == ChannelKind::zerocopy ? "zerocopy" : "copy";
}

std::optional<ChannelKind> channel_kind_from_string(std::string_view s) {
  if (s == "zerocopy") return ChannelKind::zerocopy;
  if (s == "copy") return ChannelKind::copy;
  return std::nullopt;
}

BenchTable bench_local(const std::vector<std::string>& resolutions,
                       std::uint64_t frames, ChannelKind kind) {
  check_args(resolutions, frames);

  BenchTable table;
  table.kinds = {std::string(to_string(kind))};
  table.resolutions = resolutions;
  table.warmup_frames = kWarmupFrames;

  for (const auto& resolution : resolutions) {
    const SourceParams params = bench_source_params(resolution, frames);
    SyntheticFrameSource source(params);
    LatencySink sink;

    auto [send, recv] = channel_create(8, OverflowPolicy::block);
    std::vector<std::uint64_t> sent_ids(params.budget, 0);
    const std::uint64_t copies_before = Payload::copy_count();

    std::thread producer([&, send = std::move(send)]() mutable {
      std::uint64_t next_seq = 0;
      const bool copying = (kind == ChannelKind::copy);
      while (pump_source(source, next_seq, [&](Message m) {
        sent_ids[m.seq] = m.alloc_id();
        if (copying) {
          // The copy baseline pays for its byte copy inside the measured
          // transfer interval, like any copying IPC would.
          m.sent_ns = now_ns();
          m.payload = m.payload->clone();
          return send.send_prestamped(std::move(m)) != SendStatus::closed;
        }
        return send.send(std::move(m)) != SendStatus::closed;
      })) {
      }
      send.close();
    });

    std::thread consumer([&]() {
      Message m;
      while (recv.recv(m) == RecvStatus::ok) {
        StepIo io;
        io.provide("in", std::move(m));
        sink.step(io);
      }
    });

    producer.join();
    consumer.join();

    const auto& records = sink.records();
    if (records.size() != params.budget)
      raise(Errc::run_failed,
            "lossless run delivered " + std::to_string(records.size()) +
                " of " + std::to_string(params.budget) + " frames");

    const std::span measured(records.data() + kWarmupFrames,
                             records.size() - kWarmupFrames);
    BenchCell cell;
    cell.kind = std::string(to_string(kind));
    cell.resolution = resolution;
    cell.stats = summarize(measured, LatencyMetric::transfer);
    cell.payload_copies = Payload::copy_count() - copies_before;
    for (const auto& r : measured)
      if (sent_ids[r.seq] == r.alloc_id) ++cell.alloc_id_matches;
    XRP_LOG_INFO("bench_local ", cell.kind, " ", resolution, " done");
    table.cells.push_back(std::move(cell));
  }
  return table;
}

BenchTable bench_remote(const std::vector<std::string>& resolutions,
                        std::uint64_t frames, remote::CodecId codec,
                        const std::string& addr) {
  check_args(resolutions, frames);

  remote::Addr base = remote::Addr::parse(addr);
  remote::LinkAcceptor acceptor(base);
  // reach the acceptor even when the caller asked for an ephemeral port
  const remote::Addr connect_addr{base.host, acceptor.port()};

  BenchTable table;
  const std::string kind =
      "remote-" + std::string(remote::to_string(codec));
  table.kinds = {kind};
  table.resolutions = resolutions;
  table.warmup_frames = kWarmupFrames;

  for (const auto& resolution : resolutions) {
    const SourceParams params = bench_source_params(resolution, frames);
    SyntheticFrameSource source(params);
    LatencySink sink;
    std::uint64_t wire_bytes = 0;

    remote::LinkConfig link_cfg;
    link_cfg.codec = codec;

    std::thread producer([&]() {
      auto link = remote::RemoteLink::connect(connect_addr, link_cfg);
      std::uint64_t next_seq = 0;
      while (pump_source(source, next_seq, [&](Message m) {
        wire_bytes += link.send(m);
        return true;
      })) {
      }
      link.close();
    });

    auto link = acceptor.accept(link_cfg);
    Message m;
    while (link.recv(m) == remote::LinkRecv::msg) {
      StepIo io;
      io.provide("in", std::move(m));
      sink.step(io);
    }
    producer.join();

    const auto& records = sink.records();
    if (records.size() != params.budget)
      raise(Errc::run_failed,
            "reliable link delivered " + std::to_string(records.size()) +
                " of " + std::to_string(params.budget) + " frames");

    const std::span measured(records.data() + kWarmupFrames,
                             records.size() - kWarmupFrames);
    BenchCell cell;
    cell.kind = kind;
    cell.resolution = resolution;
    cell.stats = summarize(measured, LatencyMetric::e2e);
    cell.wire_bytes_per_frame = wire_bytes / params.budget;
    XRP_LOG_INFO("bench_remote ", kind, " ", resolution, " done");
    table.cells.push_back(std::move(cell));
  }
  return table;
}

}  // namespace xrpipe::bench
