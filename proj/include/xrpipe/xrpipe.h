/* xrpipe: flexible low-latency stream-processing runtime for edge-assisted
 * pipelines. C API over the C++ core: opaque handles, integer status codes,
 * caller-owned output pointers.
 *
 * Conventions:
 *   - every function returning xrp_status yields XRP_OK (0) on success;
 *   - on failure, xrp_last_error() gives a thread-local detail message;
 *   - handles are freed with their matching *_free function;
 *   - strings and buffers returned through out-parameters are freed with
 *     xrp_string_free / xrp_buffer_free.
 */
#ifndef XRPIPE_XRPIPE_H
#define XRPIPE_XRPIPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define XRP_API __declspec(dllexport)
#else
#define XRP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xrp_status {
  XRP_OK = 0,
  XRP_ERR_INVALID_ARGUMENT,
  XRP_ERR_INVALID_SIZE,
  XRP_ERR_INVALID_CAPACITY,
  XRP_ERR_CHANNEL_CLOSED,
  XRP_ERR_SUBSCRIPTION_CLOSED,
  XRP_ERR_IMMUTABLE_PAYLOAD,
  XRP_ERR_KERNEL,
  XRP_ERR_FORMAT_MISMATCH,
  XRP_ERR_BAD_MAGIC,
  XRP_ERR_UNSUPPORTED_VERSION,
  XRP_ERR_MALFORMED_HEADER,
  XRP_ERR_MALFORMED_STREAM,
  XRP_ERR_TRUNCATED,
  XRP_ERR_SIZE_MISMATCH,
  XRP_ERR_CONNECT_TIMEOUT,
  XRP_ERR_CONNECT_REFUSED,
  XRP_ERR_PROTOCOL_VIOLATION,
  XRP_ERR_LINK_CLOSED,
  XRP_ERR_IO,
  XRP_ERR_PARSE,
  XRP_ERR_DUPLICATE_NAME,
  XRP_ERR_INVALID_CONFIG,
  XRP_ERR_UNKNOWN_KERNEL_TYPE,
  XRP_ERR_EMPTY_INPUT,
  XRP_ERR_RUN_FAILED,
  XRP_ERR_EMPTY,   /* non-blocking receive found nothing */
  XRP_ERR_UNKNOWN,
} xrp_status;

typedef enum xrp_pixel_format {
  XRP_PF_RGB8 = 0,
  XRP_PF_GRAY8 = 1,
  XRP_PF_OPAQUE = 255,
} xrp_pixel_format;

typedef enum xrp_codec { XRP_CODEC_RAW = 0, XRP_CODEC_RLE = 1 } xrp_codec;

typedef enum xrp_overflow_policy {
  XRP_POLICY_BLOCK = 0,
  XRP_POLICY_DROP_OLDEST = 1,
} xrp_overflow_policy;

typedef enum xrp_role {
  XRP_ROLE_CLIENT = 0,
  XRP_ROLE_SERVER = 1,
  XRP_ROLE_ALL = 2,
} xrp_role;

typedef enum xrp_channel_kind {
  XRP_CHANNEL_ZEROCOPY = 0,
  XRP_CHANNEL_COPY = 1,
} xrp_channel_kind;

typedef enum xrp_table_format {
  XRP_FORMAT_CSV = 0,
  XRP_FORMAT_MARKDOWN = 1,
} xrp_table_format;

typedef struct xrp_message xrp_message;
typedef struct xrp_sender xrp_sender;
typedef struct xrp_receiver xrp_receiver;
typedef struct xrp_config xrp_config;
typedef struct xrp_issues xrp_issues;
typedef struct xrp_pipeline xrp_pipeline;
typedef struct xrp_report xrp_report;
typedef struct xrp_bench_table xrp_bench_table;

XRP_API const char* xrp_version(void);
XRP_API const char* xrp_status_name(xrp_status status);
/* Thread-local message describing the most recent failure. */
XRP_API const char* xrp_last_error(void);

XRP_API void xrp_string_free(char* s);
XRP_API void xrp_buffer_free(uint8_t* buf);

/* ---- messages -------------------------------------------------------- */

/* Synthetic frame: width x height in `format`, every byte = fill. */
XRP_API xrp_status xrp_message_make_frame(uint32_t width, uint32_t height,
                                          xrp_pixel_format format,
                                          uint64_t seq, uint8_t fill,
                                          xrp_message** out);
XRP_API void xrp_message_free(xrp_message* m);

XRP_API uint64_t xrp_message_seq(const xrp_message* m);
XRP_API int64_t xrp_message_created_ns(const xrp_message* m);
XRP_API int64_t xrp_message_sent_ns(const xrp_message* m);
XRP_API uint32_t xrp_message_width(const xrp_message* m);
XRP_API uint32_t xrp_message_height(const xrp_message* m);
XRP_API xrp_pixel_format xrp_message_format(const xrp_message* m);
/* Allocation identity of the payload: the zero-copy witness. */
XRP_API uint64_t xrp_message_alloc_id(const xrp_message* m);
XRP_API size_t xrp_message_payload_len(const xrp_message* m);
XRP_API const uint8_t* xrp_message_payload(const xrp_message* m);

/* Total payload byte-copies performed by this process so far. */
XRP_API uint64_t xrp_payload_copies(void);

/* ---- local channels --------------------------------------------------- */

XRP_API xrp_status xrp_channel_create(size_t capacity,
                                      xrp_overflow_policy policy,
                                      xrp_sender** sender,
                                      xrp_receiver** receiver);
/* Adds a consumer; valid only before the channel starts delivering. */
XRP_API xrp_status xrp_channel_subscribe(xrp_sender* sender,
                                         xrp_receiver** receiver);
/* Consumes `m` on success (the handle is freed). `dropped_out` may be NULL;
 * it reports whether an older message was evicted (DROP_OLDEST). */
XRP_API xrp_status xrp_channel_send(xrp_sender* sender, xrp_message* m,
                                    int* dropped_out);
/* blocking=0 returns XRP_ERR_EMPTY immediately on an empty queue. */
XRP_API xrp_status xrp_channel_recv(xrp_receiver* receiver, int blocking,
                                    xrp_message** out);
XRP_API uint64_t xrp_sender_dropped_count(const xrp_sender* sender);
XRP_API void xrp_sender_free(xrp_sender* sender);
XRP_API void xrp_receiver_free(xrp_receiver* receiver);

/* ---- wire protocol ----------------------------------------------------- */

#define XRP_WIRE_HEADER_SIZE 36

typedef struct xrp_wire_header {
  uint8_t version;
  uint8_t msg_type; /* 0=DATA 1=HELLO 2=BYE */
  uint8_t codec;
  uint8_t pixel_format;
  uint64_t seq;
  uint64_t created_ns;
  uint32_t width;
  uint32_t height;
  uint32_t payload_len;
} xrp_wire_header;

XRP_API xrp_status xrp_header_encode(const xrp_wire_header* h,
                                     uint8_t out[XRP_WIRE_HEADER_SIZE]);
XRP_API xrp_status xrp_header_decode(const uint8_t* buf, size_t len,
                                     xrp_wire_header* out);

XRP_API xrp_status xrp_rle_compress(const uint8_t* data, size_t len,
                                    uint8_t** out, size_t* out_len);
XRP_API xrp_status xrp_rle_decompress(const uint8_t* data, size_t len,
                                      uint8_t** out, size_t* out_len);

XRP_API xrp_status xrp_message_serialize(const xrp_message* m, xrp_codec codec,
                                         uint8_t** out, size_t* out_len);
XRP_API xrp_status xrp_message_deserialize(const uint8_t* buf, size_t len,
                                           xrp_message** out);

/* ---- deployment configs ------------------------------------------------ */

XRP_API xrp_status xrp_config_parse(const char* text, xrp_config** out);
XRP_API xrp_status xrp_config_parse_file(const char* path, xrp_config** out);
XRP_API void xrp_config_free(xrp_config* cfg);

/* XRP_OK and *out == NULL when valid; XRP_ERR_INVALID_CONFIG with an issue
 * list otherwise. */
XRP_API xrp_status xrp_config_validate(const xrp_config* cfg,
                                       xrp_issues** out);
XRP_API size_t xrp_issues_count(const xrp_issues* issues);
XRP_API const char* xrp_issue_code(const xrp_issues* issues, size_t i);
XRP_API const char* xrp_issue_message(const xrp_issues* issues, size_t i);
XRP_API void xrp_issues_free(xrp_issues* issues);

/* ---- pipelines --------------------------------------------------------- */

typedef struct xrp_run_options {
  double duration_s;    /* < 0: run to completion; 0: stop immediately */
  int64_t frame_budget; /* <= 0: keep each source's configured budget */
} xrp_run_options;

XRP_API xrp_status xrp_pipeline_create(const xrp_config* cfg, xrp_role role,
                                       xrp_pipeline** out);
XRP_API xrp_status xrp_pipeline_run(xrp_pipeline* pipeline,
                                    const xrp_run_options* opts,
                                    xrp_report** out);
XRP_API void xrp_pipeline_free(xrp_pipeline* pipeline);

XRP_API int xrp_report_ok(const xrp_report* report);
XRP_API xrp_status xrp_report_render(const xrp_report* report, char** out);
/* Total frames received across this report's sinks. */
XRP_API uint64_t xrp_report_sink_received(const xrp_report* report);
XRP_API void xrp_report_free(xrp_report* report);

/* ---- benchmarks --------------------------------------------------------- */

/* `resolutions` is comma-separated: "720p,1080p,1440p,2160p" (or "WxH"). */
XRP_API xrp_status xrp_bench_local(const char* resolutions, uint64_t frames,
                                   xrp_channel_kind kind,
                                   xrp_bench_table** out);
XRP_API xrp_status xrp_bench_remote(const char* resolutions, uint64_t frames,
                                    xrp_codec codec, const char* addr,
                                    xrp_bench_table** out);

typedef struct xrp_bench_cell {
  double mean_ms;
  double p50_ms;
  double p99_ms;
  uint64_t n;
  uint64_t alloc_id_matches;
  uint64_t payload_copies;
  uint64_t wire_bytes_per_frame; /* 0 when not applicable */
} xrp_bench_cell;

XRP_API xrp_status xrp_bench_table_cell(const xrp_bench_table* table,
                                        const char* kind,
                                        const char* resolution,
                                        xrp_bench_cell* out);
XRP_API xrp_status xrp_bench_table_render(const xrp_bench_table* table,
                                          xrp_table_format format, char** out);
XRP_API void xrp_bench_table_free(xrp_bench_table* table);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* XRPIPE_XRPIPE_H */
