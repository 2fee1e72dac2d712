#include "bench/table.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "core/frame.hpp"

namespace xrpipe::bench {

namespace {

std::uint64_t pixel_count(const std::string& resolution) {
  const auto res = parse_resolution(resolution);
  if (!res) return 0;
  return static_cast<std::uint64_t>(res->width) * res->height;
}

std::vector<std::string> ascending_resolutions(const BenchTable& t) {
  std::vector<std::string> sorted = t.resolutions;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const std::string& a, const std::string& b) {
                     return pixel_count(a) < pixel_count(b);
                   });
  return sorted;
}

}  // namespace

const BenchCell* BenchTable::cell(std::string_view kind,
                                  std::string_view resolution) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.resolution == resolution) return &c;
  return nullptr;
}

std::optional<TableFormat> table_format_from_string(std::string_view s) {
  if (s == "csv") return TableFormat::csv;
  if (s == "markdown") return TableFormat::markdown;
  return std::nullopt;
}

std::string render_table(const BenchTable& t, TableFormat format) {
  const auto columns = ascending_resolutions(t);
  std::ostringstream os;
  char buf[160];

  if (format == TableFormat::csv) {
    os << "kind,resolution,mean_ms,p50_ms,p99_ms,n\n";
    for (const auto& kind : t.kinds) {
      for (const auto& res : columns) {
        const BenchCell* c = t.cell(kind, res);
        if (!c) continue;
        std::snprintf(buf, sizeof(buf), "%s,%s,%.3f,%.3f,%.3f,%llu\n",
                      c->kind.c_str(), c->resolution.c_str(), c->stats.mean_ms,
                      c->stats.p50_ms, c->stats.p99_ms,
                      static_cast<unsigned long long>(c->stats.n));
        os << buf;
      }
    }
    return os.str();
  }

  // markdown grid: kinds as rows, resolutions as columns, mean_ms cells
  os << "| kind |";
  for (const auto& res : columns) os << ' ' << res << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < columns.size(); ++i) os << "---|";
  os << '\n';
  for (const auto& kind : t.kinds) {
    os << "| " << kind << " |";
    for (const auto& res : columns) {
      const BenchCell* c = t.cell(kind, res);
      if (!c) {
        os << " - |";
        continue;
      }
      std::snprintf(buf, sizeof(buf), " %.3f |", c->stats.mean_ms);
      os << buf;
    }
    os << '\n';
  }

  bool any_wire = false;
  for (const auto& c : t.cells) any_wire |= c.wire_bytes_per_frame.has_value();
  if (any_wire) {
    os << '\n';
    for (const auto& kind : t.kinds)
      for (const auto& res : columns)
        if (const BenchCell* c = t.cell(kind, res);
            c && c->wire_bytes_per_frame)
          os << "wire bytes/frame " << kind << ' ' << res << ": "
             << *c->wire_bytes_per_frame << '\n';
  }
  std::snprintf(buf, sizeof(buf),
                "\nmean over n per cell; %d kernels, %d data link, "
                "%llu warmup frames excluded\n",
                t.kernels_per_run, t.links_per_run,
                static_cast<unsigned long long>(t.warmup_frames));
  os << buf;
  return os.str();
}

}  // namespace xrpipe::bench
