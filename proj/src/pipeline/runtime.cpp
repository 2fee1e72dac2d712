#include "pipeline/runtime.hpp"

#include <condition_variable>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bench/stats.hpp"
#include "core/clock.hpp"
#include "core/error.hpp"
#include "core/log.hpp"
#include "kernels/builtin.hpp"
#include "remote/link.hpp"

namespace xrpipe::pipeline {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::client: return "client";
    case Role::server: return "server";
    case Role::all: return "all";
  }
  return "?";
}

std::optional<Role> role_from_string(std::string_view s) {
  if (s == "client") return Role::client;
  if (s == "server") return Role::server;
  if (s == "all") return Role::all;
  return std::nullopt;
}

namespace {

bool role_owns(Role role, Placement p) {
  if (role == Role::all) return true;
  return (role == Role::client) == (p == Placement::client);
}

}  // namespace

struct RunningPipeline::Impl {
  struct Slot {
    std::string name;
    std::string type;
    Placement placement;
    std::unique_ptr<KernelRunner> runner;
    std::jthread thread;
  };

  // kernel -> wire (one per remote edge tail owned by this process)
  struct OutPump {
    RecvEndpoint from_kernel;
    remote::RemoteLink link;
    std::jthread thread;
  };

  // wire -> kernel
  struct InPump {
    SendEndpoint to_kernel;
    remote::RemoteLink link;
    std::jthread thread;
  };

  Role role = Role::all;
  std::vector<std::unique_ptr<Slot>> slots;
  std::vector<std::unique_ptr<OutPump>> out_pumps;
  std::vector<std::unique_ptr<InPump>> in_pumps;
  std::vector<ChannelHandle> channels;
  bool ran = false;

  // completion tracking for the run loop
  std::mutex mu;
  std::condition_variable cv;
  std::size_t kernels_done = 0;
  std::size_t pumps_done = 0;
  bool failure_seen = false;

  Slot* find_slot(std::string_view name) {
    for (auto& s : slots)
      if (s->name == name) return s.get();
    return nullptr;
  }

  void hard_close_everything() {
    for (auto& ch : channels) ch.hard_close();
    for (auto& p : out_pumps) p->link.hard_close();
    for (auto& p : in_pumps) p->link.hard_close();
  }

  void kernel_thread(Slot& slot, std::stop_token st) {
    slot.runner->run_loop(st);
    slot.runner->stop();
    {
      std::lock_guard lk(mu);
      ++kernels_done;
      if (!slot.runner->error().empty()) failure_seen = true;
    }
    cv.notify_all();
  }

  void out_pump_thread(OutPump& pump, std::stop_token st) {
    for (;;) {
      Message m;
      const RecvStatus rs = pump.from_kernel.recv(m, st);
      if (rs != RecvStatus::ok) break;
      try {
        pump.link.send(m);
      } catch (const std::exception& e) {
        XRP_LOG_DEBUG("out pump stopping: ", e.what());
        break;
      }
    }
    pump.link.close();  // BYE: peer drains then observes close
    pump.from_kernel.close();
    {
      std::lock_guard lk(mu);
      ++pumps_done;
    }
    cv.notify_all();
  }

  void in_pump_thread(InPump& pump, std::stop_token st) {
    for (;;) {
      Message m;
      remote::LinkRecv lr;
      try {
        lr = pump.link.recv(m);
      } catch (const std::exception& e) {
        XRP_LOG_DEBUG("in pump stopping: ", e.what());
        break;
      }
      if (lr == remote::LinkRecv::closed) break;
      const SendStatus ss = pump.to_kernel.send(std::move(m), st);
      if (ss == SendStatus::closed || ss == SendStatus::interrupted) break;
    }
    pump.to_kernel.close();
    pump.link.hard_close();
    {
      std::lock_guard lk(mu);
      ++pumps_done;
    }
    cv.notify_all();
  }
};

RunningPipeline::RunningPipeline() : impl_(std::make_unique<Impl>()) {}
RunningPipeline::RunningPipeline(RunningPipeline&&) noexcept = default;
RunningPipeline& RunningPipeline::operator=(RunningPipeline&&) noexcept = default;
RunningPipeline::~RunningPipeline() {
  if (impl_) impl_->hard_close_everything();
}

RunningPipeline RunningPipeline::instantiate(const PipelineConfig& cfg,
                                             Role role,
                                             const KernelRegistry& registry) {
  {
    const auto issues = validate_config(cfg, registry);
    if (!issues.empty()) {
      std::ostringstream os;
      os << "config is invalid:";
      for (const auto& issue : issues)
        os << ' ' << to_string(issue.code) << ';';
      raise(Errc::invalid_config, os.str());
    }
  }

  RunningPipeline pipe;
  Impl& impl = *pipe.impl_;
  impl.role = role;

  for (const auto& decl : cfg.kernels) {
    if (!role_owns(role, decl.placement)) continue;
    auto slot = std::make_unique<Impl::Slot>();
    slot->name = decl.name;
    slot->type = decl.type;
    slot->placement = decl.placement;
    slot->runner = std::make_unique<KernelRunner>(
        decl.name, registry.make(decl.type, decl.params));
    impl.slots.push_back(std::move(slot));
  }

  // Wire edges. Link establishment runs in parallel below: with role=all
  // both ends of a loopback link live in this process, and the handshake
  // needs both sides making progress.
  struct PendingLink {
    remote::RemoteLink* target = nullptr;
    std::unique_ptr<remote::LinkAcceptor> acceptor;  // listen side when set
    remote::Addr connect_addr;
    remote::LinkConfig cfg;
  };
  std::vector<PendingLink> pending;

  for (const auto& e : cfg.edges) {
    const KernelDecl* from_decl = cfg.find_kernel(e.from.kernel);
    const KernelDecl* to_decl = cfg.find_kernel(e.to.kernel);
    const bool from_owned = role_owns(role, from_decl->placement);
    const bool to_owned = role_owns(role, to_decl->placement);
    if (!from_owned && !to_owned) continue;

    if (e.kind == EdgeKind::local) {
      auto parts = channel_create_with_handle(e.capacity, e.policy);
      impl.find_slot(e.from.kernel)
          ->runner->bind_out(e.from.port, std::move(parts.send));
      impl.find_slot(e.to.kernel)
          ->runner->bind_in(e.to.port, e.sync, std::move(parts.recv));
      impl.channels.push_back(std::move(parts.handle));
      continue;
    }

    if (!e.listen_addr || !e.connect_addr)
      raise(Errc::invalid_config,
            "remote edge " + e.from.str() + "->" + e.to.str() +
                " has no transport address");
    remote::LinkConfig link_cfg;
    link_cfg.codec = e.codec;

    if (from_owned) {
      auto parts =
          channel_create_with_handle(8, OverflowPolicy::block);
      impl.find_slot(e.from.kernel)
          ->runner->bind_out(e.from.port, std::move(parts.send));
      impl.channels.push_back(std::move(parts.handle));
      auto pump = std::make_unique<Impl::OutPump>();
      pump->from_kernel = std::move(parts.recv);
      PendingLink pl;
      pl.target = &pump->link;
      pl.cfg = link_cfg;
      if (from_decl->placement == Placement::server)
        pl.acceptor = std::make_unique<remote::LinkAcceptor>(*e.listen_addr);
      else
        pl.connect_addr = *e.connect_addr;
      pending.push_back(std::move(pl));
      impl.out_pumps.push_back(std::move(pump));
    }

    if (to_owned) {
      auto parts =
          channel_create_with_handle(8, OverflowPolicy::block);
      impl.find_slot(e.to.kernel)
          ->runner->bind_in(e.to.port, e.sync, std::move(parts.recv));
      impl.channels.push_back(std::move(parts.handle));
      auto pump = std::make_unique<Impl::InPump>();
      pump->to_kernel = std::move(parts.send);
      PendingLink pl;
      pl.target = &pump->link;
      pl.cfg = link_cfg;
      if (to_decl->placement == Placement::server)
        pl.acceptor = std::make_unique<remote::LinkAcceptor>(*e.listen_addr);
      else
        pl.connect_addr = *e.connect_addr;
      pending.push_back(std::move(pl));
      impl.in_pumps.push_back(std::move(pump));
    }
  }

  if (!pending.empty()) {
    std::vector<std::exception_ptr> errors(pending.size());
    {
      std::vector<std::jthread> workers;
      workers.reserve(pending.size());
      for (std::size_t i = 0; i < pending.size(); ++i) {
        workers.emplace_back([&pending, &errors, i] {
          auto& pl = pending[i];
          try {
            *pl.target = pl.acceptor
                             ? pl.acceptor->accept(pl.cfg)
                             : remote::RemoteLink::connect(pl.connect_addr,
                                                           pl.cfg);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        });
      }
    }
    for (auto& err : errors)
      if (err) std::rethrow_exception(err);
    XRP_LOG_INFO("established ", pending.size(), " link endpoint(s)");
  }

  return pipe;
}

std::vector<std::string> RunningPipeline::kernel_names() const {
  std::vector<std::string> names;
  for (const auto& slot : impl_->slots) names.push_back(slot->name);
  return names;
}

RunReport RunningPipeline::run_for(const RunOptions& opts) {
  Impl& impl = *impl_;
  if (impl.ran)
    raise(Errc::invalid_argument, "pipeline already ran; instantiate again");
  impl.ran = true;

  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;

  if (opts.frame_budget) {
    for (auto& slot : impl.slots) {
      if (auto* src = dynamic_cast<kernels::SyntheticFrameSource*>(
              &slot->runner->kernel()))
        src->set_budget(*opts.frame_budget);
    }
  }

  const bool instant_stop = opts.duration_s && *opts.duration_s <= 0;
  if (!instant_stop) {
    for (auto& slot : impl.slots) {
      slot->runner->start();
      slot->thread = std::jthread(
          [&impl, s = slot.get()](std::stop_token st) {
            impl.kernel_thread(*s, st);
          });
    }
    for (auto& pump : impl.out_pumps)
      pump->thread = std::jthread([&impl, p = pump.get()](std::stop_token st) {
        impl.out_pump_thread(*p, st);
      });
    for (auto& pump : impl.in_pumps)
      pump->thread = std::jthread([&impl, p = pump.get()](std::stop_token st) {
        impl.in_pump_thread(*p, st);
      });

    const std::size_t n_kernels = impl.slots.size();
    const std::size_t n_pumps = impl.out_pumps.size() + impl.in_pumps.size();

    bool aborted = false;
    {
      std::unique_lock lk(impl.mu);
      auto all_kernels_done = [&] { return impl.kernels_done == n_kernels; };
      auto done_or_failed = [&] {
        return all_kernels_done() || impl.failure_seen;
      };

      if (opts.duration_s) {
        const auto deadline =
            t0 + std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::duration<double>(*opts.duration_s));
        impl.cv.wait_until(lk, deadline, done_or_failed);
      } else {
        impl.cv.wait(lk, done_or_failed);
      }

      if (impl.failure_seen) {
        // KernelError aborts the run: force everything down now.
        aborted = true;
        lk.unlock();
        for (auto& slot : impl.slots) slot->thread.request_stop();
        for (auto& pump : impl.out_pumps) pump->thread.request_stop();
        for (auto& pump : impl.in_pumps) pump->thread.request_stop();
        impl.hard_close_everything();
        lk.lock();
        impl.cv.wait(lk, all_kernels_done);
      } else if (!all_kernels_done()) {
        // Duration elapsed: stop the sources and let the tail drain.
        lk.unlock();
        for (auto& slot : impl.slots)
          if (slot->runner->is_source()) slot->thread.request_stop();
        lk.lock();
        const auto drain_deadline =
            std::chrono::steady_clock::now() + opts.drain;
        if (!impl.cv.wait_until(lk, drain_deadline, all_kernels_done)) {
          report.note = "drain window exceeded; forced shutdown";
          lk.unlock();
          for (auto& slot : impl.slots) slot->thread.request_stop();
          for (auto& pump : impl.out_pumps) pump->thread.request_stop();
          for (auto& pump : impl.in_pumps) pump->thread.request_stop();
          impl.hard_close_everything();
          lk.lock();
          impl.cv.wait(lk, all_kernels_done);
        }
      }

      // Pumps exit behind the kernels via the close cascade.
      const auto pump_deadline = std::chrono::steady_clock::now() + opts.drain;
      if (!impl.cv.wait_until(lk, pump_deadline, [&] {
            return impl.pumps_done == n_pumps;
          })) {
        lk.unlock();
        for (auto& pump : impl.out_pumps) pump->thread.request_stop();
        for (auto& pump : impl.in_pumps) pump->thread.request_stop();
        impl.hard_close_everything();
        lk.lock();
        impl.cv.wait(lk, [&] { return impl.pumps_done == n_pumps; });
      }
    }

    for (auto& slot : impl.slots)
      if (slot->thread.joinable()) slot->thread.join();
    for (auto& pump : impl.out_pumps)
      if (pump->thread.joinable()) pump->thread.join();
    for (auto& pump : impl.in_pumps)
      if (pump->thread.joinable()) pump->thread.join();
    if (aborted && report.note.empty()) report.note = "aborted on kernel error";
  } else {
    // duration 0: clean stop before anything fires
    for (auto& slot : impl.slots) {
      slot->runner->start();
      slot->runner->stop();
    }
    impl.hard_close_everything();
  }

  report.wall_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  report.ok = true;
  for (auto& slot : impl.slots) {
    auto& runner = *slot->runner;
    KernelReport kr;
    kr.name = slot->name;
    kr.type = slot->type;
    const auto counters = runner.counters();
    kr.steps = counters.steps;
    kr.msgs_in = counters.msgs_in;
    kr.msgs_out = counters.msgs_out;
    kr.drops = runner.drops();
    kr.failed = !runner.error().empty();
    kr.error = runner.error();
    if (kr.failed && report.ok) {
      report.ok = false;
      report.error = kr.name + ": " + kr.error;
    }
    report.kernels.push_back(std::move(kr));

    if (auto* sink = dynamic_cast<kernels::LatencySink*>(&runner.kernel())) {
      SinkReport sr;
      sr.kernel = slot->name;
      sr.received = sink->count();
      sr.seq_gaps = sink->seq_gaps();
      if (!sink->records().empty()) {
        const auto stats = bench::summarize(sink->records());
        sr.mean_ms = stats.mean_ms;
        sr.p50_ms = stats.p50_ms;
        sr.p99_ms = stats.p99_ms;
      }
      report.sinks.push_back(std::move(sr));
    }
  }
  return report;
}

std::string render_report(const RunReport& report) {
  std::ostringstream os;
  char buf[160];
  os << "status: " << (report.ok ? "ok" : "failed") << '\n';
  if (!report.error.empty()) os << "error: " << report.error << '\n';
  if (!report.note.empty()) os << "note: " << report.note << '\n';
  std::snprintf(buf, sizeof(buf), "wall_s: %.3f", report.wall_s);
  os << buf << '\n';
  for (const auto& k : report.kernels) {
    std::snprintf(buf, sizeof(buf),
                  "kernel %s (%s): steps=%llu in=%llu out=%llu drops=%llu",
                  k.name.c_str(), k.type.c_str(),
                  static_cast<unsigned long long>(k.steps),
                  static_cast<unsigned long long>(k.msgs_in),
                  static_cast<unsigned long long>(k.msgs_out),
                  static_cast<unsigned long long>(k.drops));
    os << buf;
    if (k.failed) os << " FAILED: " << k.error;
    os << '\n';
  }
  for (const auto& s : report.sinks) {
    std::snprintf(buf, sizeof(buf),
                  "sink %s: received=%llu gaps=%llu mean_ms=%.3f p50_ms=%.3f "
                  "p99_ms=%.3f",
                  s.kernel.c_str(),
                  static_cast<unsigned long long>(s.received),
                  static_cast<unsigned long long>(s.seq_gaps), s.mean_ms,
                  s.p50_ms, s.p99_ms);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace xrpipe::pipeline
