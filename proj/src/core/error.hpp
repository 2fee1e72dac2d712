#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xrpipe {

/// Error codes shared across the runtime and surfaced through the C API.
enum class Errc {
  ok = 0,
  invalid_argument,
  invalid_size,
  invalid_capacity,
  channel_closed,
  subscription_closed,
  immutable_payload,
  kernel_error,
  format_mismatch,
  bad_magic,
  unsupported_version,
  malformed_header,
  malformed_stream,
  truncated,
  size_mismatch,
  connect_timeout,
  connect_refused,
  protocol_violation,
  link_closed,
  io_error,
  parse_error,
  duplicate_name,
  invalid_config,
  unknown_kernel_type,
  empty_input,
  run_failed,
};

std::string_view errc_name(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, std::string msg) {
  throw Error(code, std::move(msg));
}

}  // namespace xrpipe
