#pragma once

#include <sstream>

namespace xrpipe {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Threshold from XRPIPE_LOG ({error,info,debug}; default error).
LogLevel log_level();

void log_write(LogLevel level, const std::string& line);

namespace detail {
template <typename... Args>
void log_fmt(LogLevel level, const Args&... args) {
  if (level > log_level()) return;
  std::ostringstream os;
  (os << ... << args);
  log_write(level, os.str());
}
}  // namespace detail

}  // namespace xrpipe

#define XRP_LOG_ERROR(...) ::xrpipe::detail::log_fmt(::xrpipe::LogLevel::error, __VA_ARGS__)
#define XRP_LOG_INFO(...) ::xrpipe::detail::log_fmt(::xrpipe::LogLevel::info, __VA_ARGS__)
#define XRP_LOG_DEBUG(...) ::xrpipe::detail::log_fmt(::xrpipe::LogLevel::debug, __VA_ARGS__)
