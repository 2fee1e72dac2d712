#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <stop_token>

namespace xrpipe {

/// Monotonic timestamp in nanoseconds. All message stamps use this clock;
/// values are only comparable within one host.
inline std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// Sleeps until `deadline_ns` on the monotonic clock, waking early on stop.
/// Returns false if the stop was requested before the deadline.
inline bool sleep_until_ns(std::int64_t deadline_ns, std::stop_token st) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lk(m);
  const auto tp = std::chrono::steady_clock::time_point(
      std::chrono::nanoseconds(deadline_ns));
  cv.wait_until(lk, st, tp, [] { return false; });
  return !st.stop_requested();
}

}  // namespace xrpipe
