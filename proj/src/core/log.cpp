#include "core/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

namespace xrpipe {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("XRPIPE_LOG");
    if (!env) return LogLevel::error;
    const std::string_view v(env);
    if (v == "debug") return LogLevel::debug;
    if (v == "info") return LogLevel::info;
    return LogLevel::error;
  }();
  return level;
}

void log_write(LogLevel level, const std::string& line) {
  static std::mutex mu;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::lock_guard lk(mu);
  std::cerr << "[xrpipe:" << names[static_cast<int>(level)] << "] " << line
            << '\n';
}

}  // namespace xrpipe
