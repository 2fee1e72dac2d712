#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "core/channel.hpp"
#include "core/message.hpp"

namespace xrpipe {

enum class Direction : std::uint8_t { in = 0, out = 1 };

struct PortDecl {
  std::string name;
  Direction dir = Direction::in;
};

enum class Lifecycle { created, running, stopped };

/// Inputs handed to a kernel step and the outputs it emits.
///
/// Blocking IN ports always carry a message when the step fires;
/// non-blocking ports carry the latest available sample or nothing.
class StepIo {
 public:
  explicit StepIo(std::stop_token st = {}) : stop_(std::move(st)) {}

  void provide(std::string port, Message m) {
    inputs_.emplace_back(std::move(port), std::move(m));
  }

  bool has(std::string_view port) const;
  /// Takes ownership of the input on `port`, if present.
  std::optional<Message> take(std::string_view port);

  void emit(std::string_view port, Message m) {
    emitted_.emplace_back(std::string(port), std::move(m));
  }

  std::vector<std::pair<std::string, Message>>& emitted() { return emitted_; }
  std::stop_token stop() const { return stop_; }

 private:
  std::vector<std::pair<std::string, Message>> inputs_;
  std::vector<std::pair<std::string, Message>> emitted_;
  std::stop_token stop_;
};

enum class StepStatus {
  ok,         // keep going
  completed,  // kernel finished (source budget exhausted)
};

/// An independent compute unit. Kernels declare ports, consume at most one
/// message per blocking IN port per step, and emit any number of messages
/// per OUT port. Each instance is driven by exactly one execution context.
class Kernel {
 public:
  virtual ~Kernel() = default;

  virtual std::string_view type_name() const = 0;
  virtual std::vector<PortDecl> ports() const = 0;

  /// One firing. Errors are reported by throwing; the runner turns them
  /// into a kernel failure and stops the kernel.
  virtual StepStatus step(StepIo& io) = 0;

  /// Called once after the kernel stops (flush files, etc).
  virtual void finalize() {}
};

enum class StepOutcome {
  fired,
  starved,     // a blocking IN port was empty
  completed,   // kernel or its inputs/outputs are done
  failed,      // step threw; kernel stopped
  interrupted  // stop requested
};

/// Binds a kernel to channel endpoints and enforces the firing rule:
/// fire only when every blocking IN port has a message; non-blocking ports
/// supply their newest sample and never gate. Emitted messages get a fresh
/// per-port sequence number (0,1,2,...).
class KernelRunner {
 public:
  KernelRunner(std::string name, std::unique_ptr<Kernel> kernel);

  const std::string& name() const { return name_; }
  Kernel& kernel() { return *kernel_; }
  const Kernel& kernel() const { return *kernel_; }

  void bind_in(std::string port, SyncMode sync, RecvEndpoint ep);
  void bind_out(std::string port, SendEndpoint ep);

  void start();  // created -> running
  void stop();   // -> stopped; closes endpoints and finalizes the kernel

  Lifecycle lifecycle() const { return lifecycle_.load(std::memory_order_acquire); }
  const std::string& error() const { return error_; }

  /// Non-blocking probe: fires if the firing rule is satisfied, else
  /// reports starved without consuming anything.
  StepOutcome try_step(std::stop_token st = {});

  /// Waits until the firing rule can be satisfied (or the kernel is done),
  /// then fires. Thread-loop building block.
  StepOutcome step_blocking(std::stop_token st);

  /// Thread body: steps until completed/failed/interrupted.
  void run_loop(std::stop_token st);

  struct Counters {
    std::uint64_t steps = 0;
    std::uint64_t msgs_in = 0;
    std::uint64_t msgs_out = 0;
  };
  Counters counters() const;
  std::uint64_t drops() const;  // evictions in channels this kernel feeds

  bool is_source() const { return ins_.empty(); }
  bool is_sink() const { return outs_.empty(); }

 private:
  struct InBinding {
    std::string port;
    SyncMode sync;
    RecvEndpoint ep;
  };
  struct OutBinding {
    std::string port;
    std::vector<SendEndpoint> eps;
    std::uint64_t next_seq = 0;
  };

  StepOutcome fire(std::stop_token st);
  StepOutcome route_outputs(StepIo& io, std::stop_token st);
  void complete();
  void fail(std::string why);
  OutBinding* find_out(std::string_view port);

  std::string name_;
  std::unique_ptr<Kernel> kernel_;
  std::vector<InBinding> ins_;
  std::vector<OutBinding> outs_;
  std::atomic<Lifecycle> lifecycle_{Lifecycle::created};
  std::string error_;
  std::uint64_t final_drops_ = 0;
  std::atomic<std::uint64_t> steps_{0}, msgs_in_{0}, msgs_out_{0};
};

}  // namespace xrpipe
