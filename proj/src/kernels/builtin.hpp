#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/kernel.hpp"
#include "core/params.hpp"

namespace xrpipe::kernels {

enum class FillMode { constant, gradient, random };

struct SourceParams {
  FrameSpec frame;
  double fps = 0;            // 0 = unpaced (emit as fast as consumed)
  std::uint64_t budget = 0;  // 0 = unbounded
  FillMode fill = FillMode::constant;
  std::uint8_t fill_value = 0;
  std::uint64_t seed = 0;

  static SourceParams from_map(const ParamMap& params);
};

/// Camera stand-in: emits deterministic frames on port "out".
/// Identical params (including seed) produce byte-identical streams.
class SyntheticFrameSource : public Kernel {
 public:
  explicit SyntheticFrameSource(SourceParams params);

  std::string_view type_name() const override { return "SyntheticFrameSource"; }
  std::vector<PortDecl> ports() const override;
  StepStatus step(StepIo& io) override;

  void set_budget(std::uint64_t frames) { params_.budget = frames; }
  std::uint64_t emitted() const { return next_seq_; }
  const SourceParams& params() const { return params_; }

  /// Frame content generator, exposed so tests can recompute expected bytes.
  static void fill_payload(std::uint8_t* data, std::size_t len,
                           const SourceParams& params, std::uint64_t seq);

 private:
  SourceParams params_;
  std::uint64_t next_seq_ = 0;
  std::int64_t next_deadline_ns_ = 0;
};

/// Per-pixel integer mean of (r,g,b); propagates width/height and created_ns.
class Grayscale : public Kernel {
 public:
  std::string_view type_name() const override { return "Grayscale"; }
  std::vector<PortDecl> ports() const override;
  StepStatus step(StepIo& io) override;
};

/// Emits its input unchanged (payload handle included).
class Passthrough : public Kernel {
 public:
  std::string_view type_name() const override { return "Passthrough"; }
  std::vector<PortDecl> ports() const override;
  StepStatus step(StepIo& io) override;
};

/// Fan-in: fires on the gating port "a", samples the newest message from
/// "b" when one is available, and records what it saw.
class Combiner : public Kernel {
 public:
  struct Record {
    std::uint64_t a_seq = 0;
    bool b_present = false;
    std::uint64_t b_seq = 0;
  };

  std::string_view type_name() const override { return "Combiner"; }
  std::vector<PortDecl> ports() const override;
  StepStatus step(StepIo& io) override;

  const std::vector<Record>& records() const { return records_; }

 private:
  std::vector<Record> records_;
};

struct LatencyRecord {
  std::uint64_t seq = 0;
  std::int64_t created_ns = 0;
  std::int64_t sent_ns = 0;
  std::int64_t arrival_ns = 0;
  std::uint64_t alloc_id = 0;

  std::int64_t e2e_ns() const { return arrival_ns - created_ns; }
  std::int64_t transfer_ns() const { return arrival_ns - sent_ns; }
};

/// Terminal kernel: stamps arrival time and keeps per-frame records.
/// With a dump path set, writes "seq,len,hash" lines at finalize so runs
/// can be compared across processes.
class LatencySink : public Kernel {
 public:
  explicit LatencySink(std::string dump_path = {});

  std::string_view type_name() const override { return "LatencySink"; }
  std::vector<PortDecl> ports() const override;
  StepStatus step(StepIo& io) override;
  void finalize() override;

  const std::vector<LatencyRecord>& records() const { return records_; }
  std::uint64_t count() const { return count_; }
  std::uint64_t seq_gaps() const { return seq_gaps_; }
  double mean_e2e_ms() const;

 private:
  // Records are retained up to this cap; beyond it only running stats grow.
  static constexpr std::size_t kMaxRecords = 1'000'000;

  struct DumpLine {
    std::uint64_t seq;
    std::size_t len;
    std::uint64_t hash;
  };

  std::string dump_path_;
  std::vector<LatencyRecord> records_;
  std::vector<DumpLine> dump_lines_;
  std::uint64_t count_ = 0;
  std::uint64_t seq_gaps_ = 0;
  std::optional<std::uint64_t> last_seq_;
  double sum_e2e_ms_ = 0;
};

}  // namespace xrpipe::kernels
