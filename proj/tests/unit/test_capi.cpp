// Exercises the shared library surface exactly as an external C client would.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "support/test_util.hpp"
#include "xrpipe/xrpipe.h"

namespace {

const char* kLocalConfig = R"({
  "kernels": [
    {"name": "cam", "type": "SyntheticFrameSource", "placement": "client",
     "params": {"resolution": "32x16", "fill": "constant:5", "frames": 20}},
    {"name": "sink", "type": "LatencySink", "placement": "client"}
  ],
  "edges": [{"from": "cam.out", "to": "sink.in", "kind": "local"}]
})";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(xrp_version()) == "1.0.0");
  CHECK(std::string(xrp_status_name(XRP_OK)) == "OK");
  CHECK(std::string(xrp_status_name(XRP_ERR_BAD_MAGIC)) == "BAD_MAGIC");
}

TEST_CASE("frames carry geometry, fill, and identity") {
  xrp_message* m = nullptr;
  REQUIRE(xrp_message_make_frame(1280, 720, XRP_PF_RGB8, 3, 7, &m) == XRP_OK);
  CHECK(xrp_message_payload_len(m) == 2'764'800);
  CHECK(xrp_message_seq(m) == 3);
  CHECK(xrp_message_width(m) == 1280);
  CHECK(xrp_message_format(m) == XRP_PF_RGB8);
  CHECK(xrp_message_payload(m)[12345] == 7);
  CHECK(xrp_message_alloc_id(m) != 0);
  CHECK(xrp_message_created_ns(m) > 0);

  xrp_message* other = nullptr;
  REQUIRE(xrp_message_make_frame(2, 2, XRP_PF_GRAY8, 0, 0, &other) == XRP_OK);
  CHECK(xrp_message_alloc_id(other) != xrp_message_alloc_id(m));
  xrp_message_free(other);
  xrp_message_free(m);

  CHECK(xrp_message_make_frame(0, 2, XRP_PF_RGB8, 0, 0, &m) ==
        XRP_ERR_INVALID_ARGUMENT);
  CHECK(std::string(xrp_last_error()).size() > 0);
}

TEST_CASE("channels transfer by identity through the C surface") {
  xrp_sender* s = nullptr;
  xrp_receiver* r = nullptr;
  REQUIRE(xrp_channel_create(4, XRP_POLICY_BLOCK, &s, &r) == XRP_OK);

  xrp_message* m = nullptr;
  REQUIRE(xrp_message_make_frame(4, 4, XRP_PF_GRAY8, 0, 9, &m) == XRP_OK);
  const uint64_t sent_id = xrp_message_alloc_id(m);
  const uint64_t copies_before = xrp_payload_copies();
  int dropped = -1;
  REQUIRE(xrp_channel_send(s, m, &dropped) == XRP_OK);  // consumes m
  CHECK(dropped == 0);

  xrp_message* got = nullptr;
  REQUIRE(xrp_channel_recv(r, 1, &got) == XRP_OK);
  CHECK(xrp_message_alloc_id(got) == sent_id);
  CHECK(xrp_payload_copies() == copies_before);
  xrp_message_free(got);

  CHECK(xrp_channel_recv(r, 0, &got) == XRP_ERR_EMPTY);
  xrp_sender_free(s);
  CHECK(xrp_channel_recv(r, 1, &got) == XRP_ERR_CHANNEL_CLOSED);
  xrp_receiver_free(r);

  CHECK(xrp_channel_create(0, XRP_POLICY_BLOCK, &s, &r) ==
        XRP_ERR_INVALID_CAPACITY);
}

TEST_CASE("drop-oldest counting through the C surface") {
  xrp_sender* s = nullptr;
  xrp_receiver* r = nullptr;
  REQUIRE(xrp_channel_create(1, XRP_POLICY_DROP_OLDEST, &s, &r) == XRP_OK);
  for (int i = 0; i < 3; ++i) {
    xrp_message* m = nullptr;
    REQUIRE(xrp_message_make_frame(2, 2, XRP_PF_GRAY8, i, 0, &m) == XRP_OK);
    REQUIRE(xrp_channel_send(s, m, nullptr) == XRP_OK);
  }
  CHECK(xrp_sender_dropped_count(s) == 2);
  xrp_sender_free(s);
  xrp_receiver_free(r);
}

TEST_CASE("fan-out subscription through the C surface") {
  xrp_sender* s = nullptr;
  xrp_receiver* r1 = nullptr;
  xrp_receiver* r2 = nullptr;
  REQUIRE(xrp_channel_create(4, XRP_POLICY_BLOCK, &s, &r1) == XRP_OK);
  REQUIRE(xrp_channel_subscribe(s, &r2) == XRP_OK);

  xrp_message* m = nullptr;
  REQUIRE(xrp_message_make_frame(2, 2, XRP_PF_GRAY8, 0, 1, &m) == XRP_OK);
  const uint64_t id = xrp_message_alloc_id(m);
  REQUIRE(xrp_channel_send(s, m, nullptr) == XRP_OK);

  xrp_message* a = nullptr;
  xrp_message* b = nullptr;
  REQUIRE(xrp_channel_recv(r1, 1, &a) == XRP_OK);
  REQUIRE(xrp_channel_recv(r2, 1, &b) == XRP_OK);
  CHECK(xrp_message_alloc_id(a) == id);
  CHECK(xrp_message_alloc_id(b) == id);
  xrp_message_free(a);
  xrp_message_free(b);

  xrp_receiver* r3 = nullptr;
  CHECK(xrp_channel_subscribe(s, &r3) == XRP_ERR_SUBSCRIPTION_CLOSED);
  xrp_sender_free(s);
  xrp_receiver_free(r1);
  xrp_receiver_free(r2);
}

TEST_CASE("wire header round-trip matches the fixed example") {
  xrp_wire_header h{};
  h.version = 1;
  h.msg_type = 0;
  h.codec = 0;
  h.pixel_format = 0;
  h.seq = 1;
  h.created_ns = 0;
  h.width = 1280;
  h.height = 720;
  h.payload_len = 2'764'800;

  uint8_t bytes[XRP_WIRE_HEADER_SIZE];
  REQUIRE(xrp_header_encode(&h, bytes) == XRP_OK);
  const uint8_t expected_prefix[] = {0x58, 0x52, 0x53, 0x50, 0x01,
                                     0x00, 0x00, 0x00};
  CHECK(std::memcmp(bytes, expected_prefix, sizeof(expected_prefix)) == 0);
  CHECK(bytes[35] == 0x00);
  CHECK(bytes[33] == 0x2A);

  xrp_wire_header back{};
  REQUIRE(xrp_header_decode(bytes, sizeof(bytes), &back) == XRP_OK);
  CHECK(back.width == 1280);
  CHECK(back.payload_len == 2'764'800);

  bytes[0] = 'A';
  CHECK(xrp_header_decode(bytes, sizeof(bytes), &back) == XRP_ERR_BAD_MAGIC);
}

TEST_CASE("rle compress/decompress through the C surface") {
  const uint8_t data[] = {0, 0, 0, 0};
  uint8_t* packed = nullptr;
  size_t packed_len = 0;
  REQUIRE(xrp_rle_compress(data, sizeof(data), &packed, &packed_len) == XRP_OK);
  REQUIRE(packed_len == 2);
  CHECK(packed[0] == 4);
  CHECK(packed[1] == 0);

  uint8_t* restored = nullptr;
  size_t restored_len = 0;
  REQUIRE(xrp_rle_decompress(packed, packed_len, &restored, &restored_len) ==
          XRP_OK);
  REQUIRE(restored_len == 4);
  CHECK(std::memcmp(restored, data, 4) == 0);
  xrp_buffer_free(packed);
  xrp_buffer_free(restored);

  const uint8_t bad[] = {0, 5};
  CHECK(xrp_rle_decompress(bad, sizeof(bad), &restored, &restored_len) ==
        XRP_ERR_MALFORMED_STREAM);
}

TEST_CASE("serialize/deserialize round-trip through the C surface") {
  xrp_message* m = nullptr;
  REQUIRE(xrp_message_make_frame(8, 4, XRP_PF_RGB8, 11, 3, &m) == XRP_OK);
  uint8_t* bytes = nullptr;
  size_t len = 0;
  REQUIRE(xrp_message_serialize(m, XRP_CODEC_RLE, &bytes, &len) == XRP_OK);
  CHECK(len > XRP_WIRE_HEADER_SIZE);

  xrp_message* back = nullptr;
  REQUIRE(xrp_message_deserialize(bytes, len, &back) == XRP_OK);
  CHECK(xrp_message_seq(back) == 11);
  CHECK(xrp_message_payload_len(back) == 8 * 4 * 3);
  CHECK(xrp_message_payload(back)[0] == 3);
  CHECK(xrp_message_alloc_id(back) != xrp_message_alloc_id(m));

  xrp_buffer_free(bytes);
  xrp_message_free(m);
  xrp_message_free(back);
}

TEST_CASE("config validation surfaces coded issues") {
  const char* bad = R"({
    "kernels": [
      {"name": "cam", "type": "SyntheticFrameSource", "placement": "server"},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "sink.in", "kind": "remote",
       "transport": {"listen": "127.0.0.1:7001"}}
    ]
  })";
  xrp_config* cfg = nullptr;
  REQUIRE(xrp_config_parse(bad, &cfg) == XRP_OK);
  xrp_issues* issues = nullptr;
  CHECK(xrp_config_validate(cfg, &issues) == XRP_ERR_INVALID_CONFIG);
  REQUIRE(issues != nullptr);
  REQUIRE(xrp_issues_count(issues) == 1);
  CHECK(std::string(xrp_issue_code(issues, 0)) == "PLACEMENT_VIOLATION");
  CHECK(std::string(xrp_issue_message(issues, 0)).find("cam") !=
        std::string::npos);
  xrp_issues_free(issues);
  xrp_config_free(cfg);

  CHECK(xrp_config_parse("{ not json", &cfg) == XRP_ERR_PARSE);
}

TEST_CASE("a pipeline runs end to end through the C surface") {
  xrp_config* cfg = nullptr;
  REQUIRE(xrp_config_parse(kLocalConfig, &cfg) == XRP_OK);
  xrp_issues* issues = nullptr;
  REQUIRE(xrp_config_validate(cfg, &issues) == XRP_OK);
  CHECK(issues == nullptr);

  xrp_pipeline* pipe = nullptr;
  REQUIRE(xrp_pipeline_create(cfg, XRP_ROLE_ALL, &pipe) == XRP_OK);
  xrp_run_options opts{};
  opts.duration_s = -1;   // run to completion
  opts.frame_budget = 0;  // keep the configured budget
  xrp_report* report = nullptr;
  REQUIRE(xrp_pipeline_run(pipe, &opts, &report) == XRP_OK);
  CHECK(xrp_report_ok(report) == 1);
  CHECK(xrp_report_sink_received(report) == 20);

  char* text = nullptr;
  REQUIRE(xrp_report_render(report, &text) == XRP_OK);
  CHECK(std::string(text).find("status: ok") != std::string::npos);
  xrp_string_free(text);
  xrp_report_free(report);
  xrp_pipeline_free(pipe);
  xrp_config_free(cfg);
}

TEST_CASE("bench tables flow through the C surface") {
  xrp_bench_table* table = nullptr;
  REQUIRE(xrp_bench_local("64x64", 20, XRP_CHANNEL_ZEROCOPY, &table) == XRP_OK);
  xrp_bench_cell cell{};
  REQUIRE(xrp_bench_table_cell(table, "zerocopy", "64x64", &cell) == XRP_OK);
  CHECK(cell.n == 20);
  CHECK(cell.alloc_id_matches == 20);
  CHECK(cell.payload_copies == 0);

  char* csv = nullptr;
  REQUIRE(xrp_bench_table_render(table, XRP_FORMAT_CSV, &csv) == XRP_OK);
  CHECK(std::string(csv).find("kind,resolution,mean_ms,p50_ms,p99_ms,n") == 0);
  CHECK(std::string(csv).find("zerocopy,64x64,") != std::string::npos);
  xrp_string_free(csv);

  CHECK(xrp_bench_table_cell(table, "copy", "64x64", &cell) ==
        XRP_ERR_INVALID_ARGUMENT);
  xrp_bench_table_free(table);

  CHECK(xrp_bench_local("720p", 0, XRP_CHANNEL_ZEROCOPY, &table) ==
        XRP_ERR_INVALID_ARGUMENT);
}
