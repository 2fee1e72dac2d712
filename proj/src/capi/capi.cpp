#include "xrpipe/xrpipe.h"

#include <cstring>
#include <new>
#include <sstream>
#include <string>

#include "bench/harness.hpp"
#include "core/channel.hpp"
#include "core/error.hpp"
#include "core/message.hpp"
#include "pipeline/config.hpp"
#include "pipeline/runtime.hpp"
#include "remote/rle.hpp"
#include "remote/wire.hpp"

using namespace xrpipe;

/* Handle definitions: thin heap wrappers over the C++ core. */
struct xrp_message {
  Message msg;
};
struct xrp_sender {
  SendEndpoint ep;
};
struct xrp_receiver {
  RecvEndpoint ep;
};
struct xrp_config {
  pipeline::PipelineConfig cfg;
};
struct xrp_issues {
  std::vector<pipeline::ValidationIssue> issues;
};
struct xrp_pipeline {
  pipeline::RunningPipeline pipe;
};
struct xrp_report {
  pipeline::RunReport report;
};
struct xrp_bench_table {
  bench::BenchTable table;
};

namespace {

thread_local std::string t_last_error;

xrp_status map_errc(Errc e) {
  switch (e) {
    case Errc::ok: return XRP_OK;
    case Errc::invalid_argument: return XRP_ERR_INVALID_ARGUMENT;
    case Errc::invalid_size: return XRP_ERR_INVALID_SIZE;
    case Errc::invalid_capacity: return XRP_ERR_INVALID_CAPACITY;
    case Errc::channel_closed: return XRP_ERR_CHANNEL_CLOSED;
    case Errc::subscription_closed: return XRP_ERR_SUBSCRIPTION_CLOSED;
    case Errc::immutable_payload: return XRP_ERR_IMMUTABLE_PAYLOAD;
    case Errc::kernel_error: return XRP_ERR_KERNEL;
    case Errc::format_mismatch: return XRP_ERR_FORMAT_MISMATCH;
    case Errc::bad_magic: return XRP_ERR_BAD_MAGIC;
    case Errc::unsupported_version: return XRP_ERR_UNSUPPORTED_VERSION;
    case Errc::malformed_header: return XRP_ERR_MALFORMED_HEADER;
    case Errc::malformed_stream: return XRP_ERR_MALFORMED_STREAM;
    case Errc::truncated: return XRP_ERR_TRUNCATED;
    case Errc::size_mismatch: return XRP_ERR_SIZE_MISMATCH;
    case Errc::connect_timeout: return XRP_ERR_CONNECT_TIMEOUT;
    case Errc::connect_refused: return XRP_ERR_CONNECT_REFUSED;
    case Errc::protocol_violation: return XRP_ERR_PROTOCOL_VIOLATION;
    case Errc::link_closed: return XRP_ERR_LINK_CLOSED;
    case Errc::io_error: return XRP_ERR_IO;
    case Errc::parse_error: return XRP_ERR_PARSE;
    case Errc::duplicate_name: return XRP_ERR_DUPLICATE_NAME;
    case Errc::invalid_config: return XRP_ERR_INVALID_CONFIG;
    case Errc::unknown_kernel_type: return XRP_ERR_UNKNOWN_KERNEL_TYPE;
    case Errc::empty_input: return XRP_ERR_EMPTY_INPUT;
    case Errc::run_failed: return XRP_ERR_RUN_FAILED;
  }
  return XRP_ERR_UNKNOWN;
}

xrp_status fail(xrp_status status, const char* what) {
  t_last_error = what;
  return status;
}

/* Runs `fn`, translating exceptions into status codes. */
template <typename Fn>
xrp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return fail(map_errc(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(XRP_ERR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    return fail(XRP_ERR_UNKNOWN, e.what());
  }
}

xrp_status require(bool ok, const char* what) {
  return ok ? XRP_OK : fail(XRP_ERR_INVALID_ARGUMENT, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_csv(const char* s) {
  std::vector<std::string> out;
  std::stringstream ss(s ? s : "");
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

extern "C" {

const char* xrp_version(void) { return "1.0.0"; }

const char* xrp_status_name(xrp_status status) {
  switch (status) {
    case XRP_OK: return "OK";
    case XRP_ERR_INVALID_ARGUMENT: return "INVALID_ARGUMENT";
    case XRP_ERR_INVALID_SIZE: return "INVALID_SIZE";
    case XRP_ERR_INVALID_CAPACITY: return "INVALID_CAPACITY";
    case XRP_ERR_CHANNEL_CLOSED: return "CHANNEL_CLOSED";
    case XRP_ERR_SUBSCRIPTION_CLOSED: return "SUBSCRIPTION_CLOSED";
    case XRP_ERR_IMMUTABLE_PAYLOAD: return "IMMUTABLE_PAYLOAD";
    case XRP_ERR_KERNEL: return "KERNEL_ERROR";
    case XRP_ERR_FORMAT_MISMATCH: return "FORMAT_MISMATCH";
    case XRP_ERR_BAD_MAGIC: return "BAD_MAGIC";
    case XRP_ERR_UNSUPPORTED_VERSION: return "UNSUPPORTED_VERSION";
    case XRP_ERR_MALFORMED_HEADER: return "MALFORMED_HEADER";
    case XRP_ERR_MALFORMED_STREAM: return "MALFORMED_STREAM";
    case XRP_ERR_TRUNCATED: return "TRUNCATED";
    case XRP_ERR_SIZE_MISMATCH: return "SIZE_MISMATCH";
    case XRP_ERR_CONNECT_TIMEOUT: return "CONNECT_TIMEOUT";
    case XRP_ERR_CONNECT_REFUSED: return "CONNECT_REFUSED";
    case XRP_ERR_PROTOCOL_VIOLATION: return "PROTOCOL_VIOLATION";
    case XRP_ERR_LINK_CLOSED: return "LINK_CLOSED";
    case XRP_ERR_IO: return "IO_ERROR";
    case XRP_ERR_PARSE: return "PARSE_ERROR";
    case XRP_ERR_DUPLICATE_NAME: return "DUPLICATE_NAME";
    case XRP_ERR_INVALID_CONFIG: return "INVALID_CONFIG";
    case XRP_ERR_UNKNOWN_KERNEL_TYPE: return "UNKNOWN_KERNEL_TYPE";
    case XRP_ERR_EMPTY_INPUT: return "EMPTY_INPUT";
    case XRP_ERR_RUN_FAILED: return "RUN_FAILED";
    case XRP_ERR_EMPTY: return "EMPTY";
    case XRP_ERR_UNKNOWN: return "UNKNOWN";
  }
  return "UNKNOWN";
}

const char* xrp_last_error(void) { return t_last_error.c_str(); }

void xrp_string_free(char* s) { delete[] s; }
void xrp_buffer_free(uint8_t* buf) { delete[] buf; }

/* ---- messages -------------------------------------------------------- */

xrp_status xrp_message_make_frame(uint32_t width, uint32_t height,
                                  xrp_pixel_format format, uint64_t seq,
                                  uint8_t fill, xrp_message** out) {
  if (auto rc = require(out != nullptr, "out is NULL")) return rc;
  return guarded([&] {
    FrameSpec spec{width, height, static_cast<PixelFormat>(format)};
    *out = new xrp_message{make_frame(spec, seq, fill)};
    return XRP_OK;
  });
}

void xrp_message_free(xrp_message* m) { delete m; }

uint64_t xrp_message_seq(const xrp_message* m) { return m->msg.seq; }
int64_t xrp_message_created_ns(const xrp_message* m) { return m->msg.created_ns; }
int64_t xrp_message_sent_ns(const xrp_message* m) { return m->msg.sent_ns; }
uint32_t xrp_message_width(const xrp_message* m) { return m->msg.frame.width; }
uint32_t xrp_message_height(const xrp_message* m) { return m->msg.frame.height; }

xrp_pixel_format xrp_message_format(const xrp_message* m) {
  return static_cast<xrp_pixel_format>(m->msg.frame.format);
}

uint64_t xrp_message_alloc_id(const xrp_message* m) { return m->msg.alloc_id(); }

size_t xrp_message_payload_len(const xrp_message* m) {
  return m->msg.payload ? m->msg.payload->len() : 0;
}

const uint8_t* xrp_message_payload(const xrp_message* m) {
  return m->msg.payload ? m->msg.payload->data() : nullptr;
}

uint64_t xrp_payload_copies(void) { return Payload::copy_count(); }

/* ---- local channels --------------------------------------------------- */

xrp_status xrp_channel_create(size_t capacity, xrp_overflow_policy policy,
                              xrp_sender** sender, xrp_receiver** receiver) {
  if (auto rc = require(sender && receiver, "sender/receiver out is NULL"))
    return rc;
  return guarded([&] {
    auto [s, r] =
        channel_create(capacity, static_cast<OverflowPolicy>(policy));
    *sender = new xrp_sender{std::move(s)};
    *receiver = new xrp_receiver{std::move(r)};
    return XRP_OK;
  });
}

xrp_status xrp_channel_subscribe(xrp_sender* sender, xrp_receiver** receiver) {
  if (auto rc = require(sender && receiver, "sender/receiver is NULL"))
    return rc;
  return guarded([&] {
    *receiver = new xrp_receiver{sender->ep.subscribe()};
    return XRP_OK;
  });
}

xrp_status xrp_channel_send(xrp_sender* sender, xrp_message* m,
                            int* dropped_out) {
  if (auto rc = require(sender && m, "sender/message is NULL")) return rc;
  return guarded([&] {
    const SendStatus ss = sender->ep.send(std::move(m->msg));
    if (ss == SendStatus::closed)
      return fail(XRP_ERR_CHANNEL_CLOSED, "every receiver is gone");
    delete m;  // ownership transferred
    if (dropped_out) *dropped_out = (ss == SendStatus::accepted_with_drop);
    return XRP_OK;
  });
}

xrp_status xrp_channel_recv(xrp_receiver* receiver, int blocking,
                            xrp_message** out) {
  if (auto rc = require(receiver && out, "receiver/out is NULL")) return rc;
  return guarded([&] {
    Message m;
    const RecvStatus rs =
        blocking ? receiver->ep.recv(m) : receiver->ep.try_recv(m);
    switch (rs) {
      case RecvStatus::ok:
        *out = new xrp_message{std::move(m)};
        return XRP_OK;
      case RecvStatus::empty:
        return fail(XRP_ERR_EMPTY, "queue is empty");
      case RecvStatus::closed:
        return fail(XRP_ERR_CHANNEL_CLOSED, "sender gone and queue drained");
      case RecvStatus::interrupted:
        return fail(XRP_ERR_UNKNOWN, "interrupted");
    }
    return XRP_ERR_UNKNOWN;
  });
}

uint64_t xrp_sender_dropped_count(const xrp_sender* sender) {
  return sender->ep.dropped_count();
}

void xrp_sender_free(xrp_sender* sender) { delete sender; }
void xrp_receiver_free(xrp_receiver* receiver) { delete receiver; }

/* ---- wire protocol ----------------------------------------------------- */

xrp_status xrp_header_encode(const xrp_wire_header* h,
                             uint8_t out[XRP_WIRE_HEADER_SIZE]) {
  if (auto rc = require(h && out, "header/out is NULL")) return rc;
  return guarded([&] {
    if (h->msg_type > 2)
      return fail(XRP_ERR_MALFORMED_HEADER, "unknown msg_type");
    if (h->codec > 1) return fail(XRP_ERR_MALFORMED_HEADER, "unknown codec");
    if (h->pixel_format != 0 && h->pixel_format != 1 && h->pixel_format != 255)
      return fail(XRP_ERR_MALFORMED_HEADER, "unknown pixel_format");
    remote::WireHeader wh;
    wh.version = h->version;
    wh.msg_type = static_cast<remote::MsgType>(h->msg_type);
    wh.codec = static_cast<remote::CodecId>(h->codec);
    wh.pixel_format = static_cast<PixelFormat>(h->pixel_format);
    wh.seq = h->seq;
    wh.created_ns = h->created_ns;
    wh.width = h->width;
    wh.height = h->height;
    wh.payload_len = h->payload_len;
    const auto bytes = remote::encode_header(wh);
    std::memcpy(out, bytes.data(), bytes.size());
    return XRP_OK;
  });
}

xrp_status xrp_header_decode(const uint8_t* buf, size_t len,
                             xrp_wire_header* out) {
  if (auto rc = require(buf && out, "buf/out is NULL")) return rc;
  return guarded([&] {
    const remote::WireHeader wh = remote::decode_header({buf, len});
    out->version = wh.version;
    out->msg_type = static_cast<uint8_t>(wh.msg_type);
    out->codec = static_cast<uint8_t>(wh.codec);
    out->pixel_format = static_cast<uint8_t>(wh.pixel_format);
    out->seq = wh.seq;
    out->created_ns = wh.created_ns;
    out->width = wh.width;
    out->height = wh.height;
    out->payload_len = wh.payload_len;
    return XRP_OK;
  });
}

static xrp_status copy_out(const std::vector<uint8_t>& bytes, uint8_t** out,
                           size_t* out_len) {
  *out = new uint8_t[bytes.size() ? bytes.size() : 1];
  if (!bytes.empty()) std::memcpy(*out, bytes.data(), bytes.size());
  *out_len = bytes.size();
  return XRP_OK;
}

xrp_status xrp_rle_compress(const uint8_t* data, size_t len, uint8_t** out,
                            size_t* out_len) {
  if (auto rc = require((data || len == 0) && out && out_len, "bad arguments"))
    return rc;
  return guarded(
      [&] { return copy_out(remote::rle_compress({data, len}), out, out_len); });
}

xrp_status xrp_rle_decompress(const uint8_t* data, size_t len, uint8_t** out,
                              size_t* out_len) {
  if (auto rc = require((data || len == 0) && out && out_len, "bad arguments"))
    return rc;
  return guarded([&] {
    return copy_out(remote::rle_decompress({data, len}), out, out_len);
  });
}

xrp_status xrp_message_serialize(const xrp_message* m, xrp_codec codec,
                                 uint8_t** out, size_t* out_len) {
  if (auto rc = require(m && out && out_len, "bad arguments")) return rc;
  return guarded([&] {
    return copy_out(
        remote::serialize_message(m->msg, static_cast<remote::CodecId>(codec)),
        out, out_len);
  });
}

xrp_status xrp_message_deserialize(const uint8_t* buf, size_t len,
                                   xrp_message** out) {
  if (auto rc = require(buf && out, "bad arguments")) return rc;
  return guarded([&] {
    *out = new xrp_message{remote::deserialize_message({buf, len})};
    return XRP_OK;
  });
}

/* ---- deployment configs ------------------------------------------------ */

xrp_status xrp_config_parse(const char* text, xrp_config** out) {
  if (auto rc = require(text && out, "text/out is NULL")) return rc;
  return guarded([&] {
    *out = new xrp_config{pipeline::parse_config(text)};
    return XRP_OK;
  });
}

xrp_status xrp_config_parse_file(const char* path, xrp_config** out) {
  if (auto rc = require(path && out, "path/out is NULL")) return rc;
  return guarded([&] {
    *out = new xrp_config{pipeline::parse_config_file(path)};
    return XRP_OK;
  });
}

void xrp_config_free(xrp_config* cfg) { delete cfg; }

xrp_status xrp_config_validate(const xrp_config* cfg, xrp_issues** out) {
  if (auto rc = require(cfg && out, "cfg/out is NULL")) return rc;
  return guarded([&] {
    auto issues =
        pipeline::validate_config(cfg->cfg, pipeline::KernelRegistry::global());
    if (issues.empty()) {
      *out = nullptr;
      return XRP_OK;
    }
    *out = new xrp_issues{std::move(issues)};
    return fail(XRP_ERR_INVALID_CONFIG, "config has validation issues");
  });
}

size_t xrp_issues_count(const xrp_issues* issues) {
  return issues ? issues->issues.size() : 0;
}

const char* xrp_issue_code(const xrp_issues* issues, size_t i) {
  if (!issues || i >= issues->issues.size()) return "";
  return pipeline::to_string(issues->issues[i].code).data();
}

const char* xrp_issue_message(const xrp_issues* issues, size_t i) {
  if (!issues || i >= issues->issues.size()) return "";
  return issues->issues[i].message.c_str();
}

void xrp_issues_free(xrp_issues* issues) { delete issues; }

/* ---- pipelines --------------------------------------------------------- */

xrp_status xrp_pipeline_create(const xrp_config* cfg, xrp_role role,
                               xrp_pipeline** out) {
  if (auto rc = require(cfg && out, "cfg/out is NULL")) return rc;
  return guarded([&] {
    *out = new xrp_pipeline{pipeline::RunningPipeline::instantiate(
        cfg->cfg, static_cast<pipeline::Role>(role))};
    return XRP_OK;
  });
}

xrp_status xrp_pipeline_run(xrp_pipeline* pipeline_handle,
                            const xrp_run_options* opts, xrp_report** out) {
  if (auto rc = require(pipeline_handle && out, "pipeline/out is NULL"))
    return rc;
  return guarded([&] {
    pipeline::RunOptions options;
    if (opts) {
      if (opts->duration_s >= 0) options.duration_s = opts->duration_s;
      if (opts->frame_budget > 0)
        options.frame_budget = static_cast<uint64_t>(opts->frame_budget);
    }
    *out = new xrp_report{pipeline_handle->pipe.run_for(options)};
    return XRP_OK;
  });
}

void xrp_pipeline_free(xrp_pipeline* pipeline_handle) {
  delete pipeline_handle;
}

int xrp_report_ok(const xrp_report* report) {
  return report && report->report.ok ? 1 : 0;
}

xrp_status xrp_report_render(const xrp_report* report, char** out) {
  if (auto rc = require(report && out, "report/out is NULL")) return rc;
  return guarded([&] {
    *out = dup_string(pipeline::render_report(report->report));
    return XRP_OK;
  });
}

uint64_t xrp_report_sink_received(const xrp_report* report) {
  if (!report) return 0;
  uint64_t total = 0;
  for (const auto& sink : report->report.sinks) total += sink.received;
  return total;
}

void xrp_report_free(xrp_report* report) { delete report; }

/* ---- benchmarks --------------------------------------------------------- */

xrp_status xrp_bench_local(const char* resolutions, uint64_t frames,
                           xrp_channel_kind kind, xrp_bench_table** out) {
  if (auto rc = require(resolutions && out, "resolutions/out is NULL"))
    return rc;
  return guarded([&] {
    *out = new xrp_bench_table{bench::bench_local(
        split_csv(resolutions), frames, static_cast<bench::ChannelKind>(kind))};
    return XRP_OK;
  });
}

xrp_status xrp_bench_remote(const char* resolutions, uint64_t frames,
                            xrp_codec codec, const char* addr,
                            xrp_bench_table** out) {
  if (auto rc = require(resolutions && addr && out, "bad arguments"))
    return rc;
  return guarded([&] {
    *out = new xrp_bench_table{
        bench::bench_remote(split_csv(resolutions), frames,
                            static_cast<remote::CodecId>(codec), addr)};
    return XRP_OK;
  });
}

xrp_status xrp_bench_table_cell(const xrp_bench_table* table, const char* kind,
                                const char* resolution, xrp_bench_cell* out) {
  if (auto rc = require(table && kind && resolution && out, "bad arguments"))
    return rc;
  const bench::BenchCell* cell = table->table.cell(kind, resolution);
  if (!cell) return fail(XRP_ERR_INVALID_ARGUMENT, "no such cell");
  out->mean_ms = cell->stats.mean_ms;
  out->p50_ms = cell->stats.p50_ms;
  out->p99_ms = cell->stats.p99_ms;
  out->n = cell->stats.n;
  out->alloc_id_matches = cell->alloc_id_matches;
  out->payload_copies = cell->payload_copies;
  out->wire_bytes_per_frame = cell->wire_bytes_per_frame.value_or(0);
  return XRP_OK;
}

xrp_status xrp_bench_table_render(const xrp_bench_table* table,
                                  xrp_table_format format, char** out) {
  if (auto rc = require(table && out, "table/out is NULL")) return rc;
  return guarded([&] {
    *out = dup_string(bench::render_table(
        table->table, static_cast<bench::TableFormat>(format)));
    return XRP_OK;
  });
}

void xrp_bench_table_free(xrp_bench_table* table) { delete table; }

} /* extern "C" */
