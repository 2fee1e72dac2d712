#include "core/kernel.hpp"

#include <chrono>
#include <thread>

#include "core/error.hpp"

namespace xrpipe {

bool StepIo::has(std::string_view port) const {
  for (const auto& [name, _] : inputs_)
    if (name == port) return true;
  return false;
}

std::optional<Message> StepIo::take(std::string_view port) {
  for (auto it = inputs_.begin(); it != inputs_.end(); ++it) {
    if (it->first == port) {
      Message m = std::move(it->second);
      inputs_.erase(it);
      return m;
    }
  }
  return std::nullopt;
}

KernelRunner::KernelRunner(std::string name, std::unique_ptr<Kernel> kernel)
    : name_(std::move(name)), kernel_(std::move(kernel)) {}

void KernelRunner::bind_in(std::string port, SyncMode sync, RecvEndpoint ep) {
  ins_.push_back({std::move(port), sync, std::move(ep)});
}

void KernelRunner::bind_out(std::string port, SendEndpoint ep) {
  if (auto* b = find_out(port)) {
    b->eps.push_back(std::move(ep));
    return;
  }
  OutBinding b;
  b.port = std::move(port);
  b.eps.push_back(std::move(ep));
  outs_.push_back(std::move(b));
}

KernelRunner::OutBinding* KernelRunner::find_out(std::string_view port) {
  for (auto& b : outs_)
    if (b.port == port) return &b;
  return nullptr;
}

void KernelRunner::start() {
  if (lifecycle_ != Lifecycle::created)
    raise(Errc::invalid_argument, "kernel '" + name_ + "' already started");
  lifecycle_ = Lifecycle::running;
}

void KernelRunner::stop() {
  if (lifecycle_ == Lifecycle::stopped) return;
  lifecycle_ = Lifecycle::stopped;
  final_drops_ = drops();
  for (auto& in : ins_) in.ep.close();
  for (auto& out : outs_)
    for (auto& ep : out.eps) ep.close();
  kernel_->finalize();
}

void KernelRunner::complete() { stop(); }

void KernelRunner::fail(std::string why) {
  error_ = std::move(why);
  stop();
}

StepOutcome KernelRunner::try_step(std::stop_token st) {
  if (lifecycle_ != Lifecycle::running)
    raise(Errc::invalid_argument, "kernel '" + name_ + "' is not running");

  // The firing rule gates on blocking ports only. Each endpoint has a single
  // consumer (this runner), so a non-empty observation is stable.
  for (const auto& in : ins_) {
    if (in.sync != SyncMode::blocking) continue;
    if (in.ep.closed_and_empty()) {
      complete();
      return StepOutcome::completed;
    }
    if (!in.ep.ready()) return StepOutcome::starved;
  }
  return fire(st);
}

StepOutcome KernelRunner::fire(std::stop_token st) {
  StepIo io(st);
  for (auto& in : ins_) {
    Message m;
    if (in.sync == SyncMode::blocking) {
      const RecvStatus rs = in.ep.try_recv(m);
      if (rs != RecvStatus::ok) {
        // Raced with nothing: we are the only consumer. Treat as starved.
        return rs == RecvStatus::closed ? (complete(), StepOutcome::completed)
                                        : StepOutcome::starved;
      }
      msgs_in_.fetch_add(1, std::memory_order_relaxed);
      io.provide(in.port, std::move(m));
    } else {
      std::size_t discarded = 0;
      if (in.ep.recv_latest(m, discarded) == RecvStatus::ok) {
        msgs_in_.fetch_add(1 + discarded, std::memory_order_relaxed);
        io.provide(in.port, std::move(m));
      }
    }
  }

  StepStatus status;
  try {
    status = kernel_->step(io);
  } catch (const std::exception& e) {
    fail(std::string(e.what()));
    return StepOutcome::failed;
  }

  steps_.fetch_add(1, std::memory_order_relaxed);
  const StepOutcome routed = route_outputs(io, st);
  if (routed != StepOutcome::fired) return routed;

  if (status == StepStatus::completed) {
    complete();
    return StepOutcome::completed;
  }
  return StepOutcome::fired;
}

StepOutcome KernelRunner::route_outputs(StepIo& io, std::stop_token st) {
  for (auto& [port, msg] : io.emitted()) {
    auto* binding = find_out(port);
    if (!binding) {
      fail("kernel '" + name_ + "' emitted on unbound port '" + port + "'");
      return StepOutcome::failed;
    }
    msg.seq = binding->next_seq++;
    bool delivered = false;
    for (std::size_t i = 0; i < binding->eps.size(); ++i) {
      const bool last = (i + 1 == binding->eps.size());
      const SendStatus ss =
          binding->eps[i].send(last ? std::move(msg) : Message(msg), st);
      if (ss == SendStatus::interrupted) return StepOutcome::interrupted;
      if (ss != SendStatus::closed) delivered = true;
    }
    if (delivered) msgs_out_.fetch_add(1, std::memory_order_relaxed);
  }
  io.emitted().clear();

  // A kernel with outputs but no remaining consumers can never be observed
  // again; let the completion cascade upstream.
  if (!outs_.empty()) {
    bool any_open = false;
    for (auto& out : outs_)
      for (auto& ep : out.eps)
        if (ep.valid()) any_open = true;
    if (!any_open) {
      complete();
      return StepOutcome::completed;
    }
  }
  return StepOutcome::fired;
}

StepOutcome KernelRunner::step_blocking(std::stop_token st) {
  if (lifecycle_ != Lifecycle::running)
    raise(Errc::invalid_argument, "kernel '" + name_ + "' is not running");

  bool has_blocking = false;
  for (auto& in : ins_) {
    if (in.sync != SyncMode::blocking) continue;
    has_blocking = true;
    switch (in.ep.wait_ready(st)) {
      case RecvEndpoint::Wait::ready:
        break;
      case RecvEndpoint::Wait::closed:
        complete();
        return StepOutcome::completed;
      case RecvEndpoint::Wait::interrupted:
        return StepOutcome::interrupted;
    }
  }

  if (!has_blocking && !ins_.empty()) {
    // Only non-blocking inputs: poll for any sample instead of spinning.
    for (;;) {
      bool any_ready = false, all_closed = true;
      for (auto& in : ins_) {
        if (in.ep.ready()) any_ready = true;
        if (!in.ep.closed_and_empty()) all_closed = false;
      }
      if (any_ready) break;
      if (all_closed) {
        complete();
        return StepOutcome::completed;
      }
      if (st.stop_requested()) return StepOutcome::interrupted;
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }

  return fire(st);
}

void KernelRunner::run_loop(std::stop_token st) {
  while (lifecycle_ == Lifecycle::running) {
    const StepOutcome out = step_blocking(st);
    if (out == StepOutcome::fired || out == StepOutcome::starved) continue;
    if (out == StepOutcome::interrupted) {
      complete();
      return;
    }
    return;  // completed or failed: runner already stopped
  }
}

KernelRunner::Counters KernelRunner::counters() const {
  return {steps_.load(std::memory_order_relaxed),
          msgs_in_.load(std::memory_order_relaxed),
          msgs_out_.load(std::memory_order_relaxed)};
}

std::uint64_t KernelRunner::drops() const {
  if (lifecycle_ == Lifecycle::stopped) return final_drops_;
  std::uint64_t n = 0;
  for (const auto& out : outs_)
    for (const auto& ep : out.eps)
      if (ep.valid()) n += ep.dropped_count();
  return n;
}

}  // namespace xrpipe
