#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pipeline/config.hpp"
#include "pipeline/registry.hpp"

namespace xrpipe::pipeline {

enum class Role : std::uint8_t { client = 0, server = 1, all = 2 };

std::string_view to_string(Role r);
std::optional<Role> role_from_string(std::string_view s);

struct KernelReport {
  std::string name;
  std::string type;
  std::uint64_t steps = 0;
  std::uint64_t msgs_in = 0;
  std::uint64_t msgs_out = 0;
  std::uint64_t drops = 0;
  bool failed = false;
  std::string error;
};

struct SinkReport {
  std::string kernel;
  std::uint64_t received = 0;
  std::uint64_t seq_gaps = 0;
  double mean_ms = 0;  // created -> arrival
  double p50_ms = 0;
  double p99_ms = 0;
};

struct RunReport {
  bool ok = false;
  std::string error;  // first kernel failure, when any
  std::string note;   // shutdown anomalies (forced drain)
  double wall_s = 0;
  std::vector<KernelReport> kernels;
  std::vector<SinkReport> sinks;
};

/// Plain-text layout printed by the CLI (one kernel/sink per line).
std::string render_report(const RunReport& report);

struct RunOptions {
  /// Wall-clock cap; 0 stops before any kernel fires. Unset = run to
  /// completion (every source must be bounded or fed by a peer process).
  std::optional<double> duration_s;
  /// Overrides every source's frame budget for this run.
  std::optional<std::uint64_t> frame_budget;
  /// How long in-flight frames may keep landing after sources stop.
  std::chrono::milliseconds drain{2000};
};

/// A deployment-time instantiation of a config, filtered by role: this
/// process builds only the kernels placed on it, local edges become
/// channels, and remote edges open their link endpoint here (the server
/// side listens, the client side connects; role=all opens both over
/// loopback so the wire path is still exercised).
class RunningPipeline {
 public:
  static RunningPipeline instantiate(
      const PipelineConfig& cfg, Role role,
      const KernelRegistry& registry = KernelRegistry::global());

  RunningPipeline(RunningPipeline&&) noexcept;
  RunningPipeline& operator=(RunningPipeline&&) noexcept;
  ~RunningPipeline();

  /// Starts every kernel, runs until the duration elapses or all kernels
  /// complete (sources exhaust budgets, upstream links close), drains, and
  /// stops cleanly. A kernel failure aborts the run. Single use.
  RunReport run_for(const RunOptions& opts);

  std::vector<std::string> kernel_names() const;

 private:
  RunningPipeline();

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace xrpipe::pipeline
