#include "bench/stats.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace xrpipe::bench {

namespace {

double nearest_rank_ms(const std::vector<std::int64_t>& sorted, double q) {
  const auto n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return static_cast<double>(sorted[rank - 1]) / 1e6;
}

}  // namespace

LatencySummary summarize_ns(std::span<const std::int64_t> samples_ns) {
  if (samples_ns.empty())
    raise(Errc::empty_input, "no latency samples to summarize");
  std::vector<std::int64_t> sorted(samples_ns.begin(), samples_ns.end());
  std::sort(sorted.begin(), sorted.end());

  double sum = 0;
  for (const auto s : samples_ns) sum += static_cast<double>(s);

  LatencySummary out;
  out.n = samples_ns.size();
  out.mean_ms = sum / static_cast<double>(out.n) / 1e6;
  out.p50_ms = nearest_rank_ms(sorted, 0.50);
  out.p99_ms = nearest_rank_ms(sorted, 0.99);
  return out;
}

LatencySummary summarize(std::span<const LatencyRecord> records,
                         LatencyMetric metric) {
  std::vector<std::int64_t> samples;
  samples.reserve(records.size());
  for (const auto& r : records)
    samples.push_back(metric == LatencyMetric::e2e ? r.e2e_ns()
                                                   : r.transfer_ns());
  return summarize_ns(samples);
}

}  // namespace xrpipe::bench
