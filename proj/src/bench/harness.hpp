#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bench/table.hpp"
#include "remote/wire.hpp"

namespace xrpipe::bench {

enum class ChannelKind : std::uint8_t {
  zerocopy = 0,  // the runtime channel: handle transfer only
  copy = 1,      // pessimized baseline: full payload byte copy at send
};

std::string_view to_string(ChannelKind k);
std::optional<ChannelKind> channel_kind_from_string(std::string_view s);

inline constexpr std::uint64_t kWarmupFrames = 50;

/// Source -> one local channel -> sink, per resolution. Measures the
/// sent->arrival transfer interval over exactly `frames` transmissions
/// after a 50-frame warmup. The cell self-reports alloc_id matches and the
/// payload copy-counter delta.
BenchTable bench_local(const std::vector<std::string>& resolutions,
                       std::uint64_t frames, ChannelKind kind);

/// Source -> one loopback link -> sink, per resolution; created->arrival
/// latency plus bytes-on-wire per frame. `addr` may use port 0 for an
/// ephemeral port. Both endpoints run in this process so the clocks agree.
BenchTable bench_remote(const std::vector<std::string>& resolutions,
                        std::uint64_t frames, remote::CodecId codec,
                        const std::string& addr);

}  // namespace xrpipe::bench
