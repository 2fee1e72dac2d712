#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bench/stats.hpp"

namespace xrpipe::bench {

struct BenchCell {
  std::string kind;        // "zerocopy", "copy", "remote-raw", "remote-rle"
  std::string resolution;  // "720p" ... or "WxH"
  LatencySummary stats;
  // harness self-report
  std::uint64_t alloc_id_matches = 0;  // frames whose alloc_id survived
  std::uint64_t payload_copies = 0;    // copy-counter delta over the run
  std::optional<std::uint64_t> wire_bytes_per_frame;  // remote rows only
};

/// Rows are channel/link kinds, columns are resolutions (rendered in
/// ascending pixel count). Methodology fields describe every cell: a
/// two-kernel pipeline with one data link, warmup excluded from stats.
struct BenchTable {
  std::vector<std::string> kinds;        // declaration order
  std::vector<std::string> resolutions;  // as requested
  std::vector<BenchCell> cells;
  int kernels_per_run = 2;
  int links_per_run = 1;
  std::uint64_t warmup_frames = 0;

  const BenchCell* cell(std::string_view kind, std::string_view resolution) const;
};

enum class TableFormat { csv, markdown };

std::optional<TableFormat> table_format_from_string(std::string_view s);

/// CSV: header "kind,resolution,mean_ms,p50_ms,p99_ms,n", one row per cell,
/// kinds in declaration order and resolutions ascending, milliseconds with
/// three decimals. Markdown mirrors the paper-table shape (kinds as rows,
/// resolutions as columns, mean latency per cell).
std::string render_table(const BenchTable& t, TableFormat format);

}  // namespace xrpipe::bench
