#include "core/error.hpp"

namespace xrpipe {

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::ok: return "OK";
    case Errc::invalid_argument: return "INVALID_ARGUMENT";
    case Errc::invalid_size: return "INVALID_SIZE";
    case Errc::invalid_capacity: return "INVALID_CAPACITY";
    case Errc::channel_closed: return "CHANNEL_CLOSED";
    case Errc::subscription_closed: return "SUBSCRIPTION_CLOSED";
    case Errc::immutable_payload: return "IMMUTABLE_PAYLOAD";
    case Errc::kernel_error: return "KERNEL_ERROR";
    case Errc::format_mismatch: return "FORMAT_MISMATCH";
    case Errc::bad_magic: return "BAD_MAGIC";
    case Errc::unsupported_version: return "UNSUPPORTED_VERSION";
    case Errc::malformed_header: return "MALFORMED_HEADER";
    case Errc::malformed_stream: return "MALFORMED_STREAM";
    case Errc::truncated: return "TRUNCATED";
    case Errc::size_mismatch: return "SIZE_MISMATCH";
    case Errc::connect_timeout: return "CONNECT_TIMEOUT";
    case Errc::connect_refused: return "CONNECT_REFUSED";
    case Errc::protocol_violation: return "PROTOCOL_VIOLATION";
    case Errc::link_closed: return "LINK_CLOSED";
    case Errc::io_error: return "IO_ERROR";
    case Errc::parse_error: return "PARSE_ERROR";
    case Errc::duplicate_name: return "DUPLICATE_NAME";
    case Errc::invalid_config: return "INVALID_CONFIG";
    case Errc::unknown_kernel_type: return "UNKNOWN_KERNEL_TYPE";
    case Errc::empty_input: return "EMPTY_INPUT";
    case Errc::run_failed: return "RUN_FAILED";
  }
  return "UNKNOWN";
}

}  // namespace xrpipe
