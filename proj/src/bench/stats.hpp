#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kernels/builtin.hpp"

namespace xrpipe::bench {

using kernels::LatencyRecord;

struct LatencySummary {
  double mean_ms = 0;
  double p50_ms = 0;
  double p99_ms = 0;
  std::uint64_t n = 0;
};

/// Arithmetic mean plus nearest-rank percentiles (the ceil(q*n)-th smallest
/// value, 1-indexed). Raises EMPTY_INPUT on no samples.
LatencySummary summarize_ns(std::span<const std::int64_t> samples_ns);

enum class LatencyMetric {
  e2e,       // created -> arrival
  transfer,  // sent -> arrival (the data-link interval)
};

LatencySummary summarize(std::span<const LatencyRecord> records,
                         LatencyMetric metric = LatencyMetric::e2e);

}  // namespace xrpipe::bench
