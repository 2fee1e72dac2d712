#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "pipeline/config.hpp"
#include "pipeline/registry.hpp"
#include "support/test_util.hpp"

using namespace xrpipe;
using namespace xrpipe::pipeline;
using test_util::errc_of;

namespace {

const char* kMinimal = R"({
  "kernels": [
    {"name": "cam", "type": "SyntheticFrameSource", "placement": "client",
     "params": {"resolution": "720p", "frames": 10}},
    {"name": "sink", "type": "LatencySink", "placement": "client"}
  ],
  "edges": [
    {"from": "cam.out", "to": "sink.in", "kind": "local"}
  ]
})";

std::vector<ValidationIssue> validated(const std::string& text) {
  return validate_config(parse_config(text), KernelRegistry::global());
}

bool has_code(const std::vector<ValidationIssue>& issues, ValidationCode code) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const auto& i) { return i.code == code; });
}

}  // namespace

TEST_CASE("a minimal local config parses with defaults") {
  const PipelineConfig cfg = parse_config(kMinimal);
  REQUIRE(cfg.kernels.size() == 2);
  REQUIRE(cfg.edges.size() == 1);
  const EdgeDecl& e = cfg.edges.front();
  CHECK(e.kind == EdgeKind::local);
  CHECK(e.capacity == 8);
  CHECK(e.policy == OverflowPolicy::block);
  CHECK(e.sync == SyncMode::blocking);
  CHECK(e.from.kernel == "cam");
  CHECK(e.from.port == "out");
  CHECK(validated(kMinimal).empty());
}

TEST_CASE("remote edges parse codec and transport, defaults mirrored") {
  const PipelineConfig cfg = parse_config(R"({
    "kernels": [
      {"name": "cam", "type": "SyntheticFrameSource", "placement": "client",
       "params": {"resolution": "720p"}},
      {"name": "gray", "type": "Grayscale", "placement": "server"},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "gray.in", "kind": "remote", "codec": "rle",
       "transport": {"listen": "127.0.0.1:7001"}},
      {"from": "gray.out", "to": "sink.in", "kind": "remote",
       "transport": {"connect": "127.0.0.1:7002"}}
    ]
  })");
  const EdgeDecl& up = cfg.edges[0];
  CHECK(up.codec == remote::CodecId::rle);
  REQUIRE(up.listen_addr.has_value());
  REQUIRE(up.connect_addr.has_value());
  CHECK(up.connect_addr->port == 7001);  // mirrored from listen
  const EdgeDecl& down = cfg.edges[1];
  CHECK(down.codec == remote::CodecId::raw);
  CHECK(down.listen_addr->port == 7002);  // mirrored from connect
}

TEST_CASE("duplicate kernel names are rejected at parse time") {
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [
              {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
              {"name": "cam", "type": "LatencySink", "placement": "client"}
            ],
            "edges": []
          })");
        }) == Errc::duplicate_name);
}

TEST_CASE("unknown fields are parse errors") {
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [], "edges": [], "extra": 1
          })");
        }) == Errc::parse_error);
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [
              {"name": "cam", "type": "SyntheticFrameSource",
               "placement": "client", "typo": true}
            ],
            "edges": []
          })");
        }) == Errc::parse_error);
}

TEST_CASE("syntax errors report the line") {
  try {
    parse_config("{\n  \"kernels\": [\n  broken\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("field misuse is rejected") {
  // capacity makes no sense on a remote edge
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [
              {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
              {"name": "gray", "type": "Grayscale", "placement": "server"}
            ],
            "edges": [
              {"from": "cam.out", "to": "gray.in", "kind": "remote",
               "capacity": 4, "transport": {"listen": "127.0.0.1:7001"}}
            ]
          })");
        }) == Errc::parse_error);
  // remote edges need a transport
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [
              {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
              {"name": "gray", "type": "Grayscale", "placement": "server"}
            ],
            "edges": [
              {"from": "cam.out", "to": "gray.in", "kind": "remote"}
            ]
          })");
        }) == Errc::parse_error);
  // codec is a remote-edge concept
  CHECK(errc_of([] {
          parse_config(R"({
            "kernels": [
              {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
              {"name": "sink", "type": "LatencySink", "placement": "client"}
            ],
            "edges": [
              {"from": "cam.out", "to": "sink.in", "kind": "local", "codec": "rle"}
            ]
          })");
        }) == Errc::parse_error);
}

TEST_CASE("PLACEMENT_VIOLATION: sources and sinks must sit on the client") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "cam", "type": "SyntheticFrameSource", "placement": "server",
       "params": {"resolution": "720p"}},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "sink.in", "kind": "remote",
       "transport": {"listen": "127.0.0.1:7001"}}
    ]
  })");
  CHECK(has_code(issues, ValidationCode::placement_violation));
  CHECK(issues.size() == 1);
}

TEST_CASE("EDGE_KIND_MISMATCH: kind must match the placements") {
  SUBCASE("local edge across hosts") {
    const auto issues = validated(R"({
      "kernels": [
        {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
        {"name": "gray", "type": "Grayscale", "placement": "server"},
        {"name": "sink", "type": "LatencySink", "placement": "client"}
      ],
      "edges": [
        {"from": "cam.out", "to": "gray.in", "kind": "local"},
        {"from": "gray.out", "to": "sink.in", "kind": "remote",
         "transport": {"listen": "127.0.0.1:7001"}}
      ]
    })");
    CHECK(has_code(issues, ValidationCode::edge_kind_mismatch));
    CHECK(issues.size() == 1);
  }
  SUBCASE("remote edge within one host") {
    const auto issues = validated(R"({
      "kernels": [
        {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
        {"name": "sink", "type": "LatencySink", "placement": "client"}
      ],
      "edges": [
        {"from": "cam.out", "to": "sink.in", "kind": "remote",
         "transport": {"listen": "127.0.0.1:7001"}}
      ]
    })");
    CHECK(has_code(issues, ValidationCode::edge_kind_mismatch));
  }
}

TEST_CASE("NOT_A_DAG: cycles are rejected") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "p1", "type": "Passthrough", "placement": "client"},
      {"name": "p2", "type": "Passthrough", "placement": "client"}
    ],
    "edges": [
      {"from": "p1.out", "to": "p2.in", "kind": "local"},
      {"from": "p2.out", "to": "p1.in", "kind": "local"}
    ]
  })");
  CHECK(has_code(issues, ValidationCode::not_a_dag));
  CHECK(issues.size() == 1);
}

TEST_CASE("UNKNOWN_KERNEL_TYPE is reported per kernel") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "cam", "type": "Nonexistent", "placement": "client"},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "sink.in", "kind": "local"}
    ]
  })");
  CHECK(has_code(issues, ValidationCode::unknown_kernel_type));
}

TEST_CASE("DANGLING_PORT: unknown endpoints and unwired ports") {
  SUBCASE("edge references a missing port") {
    const auto issues = validated(R"({
      "kernels": [
        {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
        {"name": "sink", "type": "LatencySink", "placement": "client"}
      ],
      "edges": [
        {"from": "cam.out", "to": "sink.nope", "kind": "local"},
        {"from": "cam.out", "to": "sink.in", "kind": "local"}
      ]
    })");
    CHECK(has_code(issues, ValidationCode::dangling_port));
  }
  SUBCASE("edge references a missing kernel") {
    const auto issues = validated(R"({
      "kernels": [
        {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
        {"name": "sink", "type": "LatencySink", "placement": "client"}
      ],
      "edges": [
        {"from": "ghost.out", "to": "sink.in", "kind": "local"},
        {"from": "cam.out", "to": "sink.in", "kind": "local"}
      ]
    })");
    CHECK(has_code(issues, ValidationCode::dangling_port));
  }
  SUBCASE("declared IN port left unconnected") {
    const auto issues = validated(R"({
      "kernels": [
        {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
        {"name": "comb", "type": "Combiner", "placement": "client"},
        {"name": "sink", "type": "LatencySink", "placement": "client"}
      ],
      "edges": [
        {"from": "cam.out", "to": "comb.a", "kind": "local"},
        {"from": "comb.out", "to": "sink.in", "kind": "local"}
      ]
    })");
    CHECK(has_code(issues, ValidationCode::dangling_port));  // comb.b unwired
  }
}

TEST_CASE("PORT_MULTIPLY_DRIVEN: an IN port takes exactly one edge") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "cam1", "type": "SyntheticFrameSource", "placement": "client"},
      {"name": "cam2", "type": "SyntheticFrameSource", "placement": "client"},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam1.out", "to": "sink.in", "kind": "local"},
      {"from": "cam2.out", "to": "sink.in", "kind": "local"}
    ]
  })");
  CHECK(has_code(issues, ValidationCode::port_multiply_driven));
}

TEST_CASE("every violation is reported, not just the first") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "cam", "type": "SyntheticFrameSource", "placement": "server"},
      {"name": "ghost_type", "type": "Nonexistent", "placement": "client"},
      {"name": "sink", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "sink.in", "kind": "remote",
       "transport": {"listen": "127.0.0.1:7001"}}
    ]
  })");
  CHECK(has_code(issues, ValidationCode::placement_violation));
  CHECK(has_code(issues, ValidationCode::unknown_kernel_type));
  CHECK(issues.size() >= 2);
}

TEST_CASE("out ports may fan out to several edges") {
  const auto issues = validated(R"({
    "kernels": [
      {"name": "cam", "type": "SyntheticFrameSource", "placement": "client"},
      {"name": "sink1", "type": "LatencySink", "placement": "client"},
      {"name": "sink2", "type": "LatencySink", "placement": "client"}
    ],
    "edges": [
      {"from": "cam.out", "to": "sink1.in", "kind": "local"},
      {"from": "cam.out", "to": "sink2.in", "kind": "local"}
    ]
  })");
  CHECK(issues.empty());
}

TEST_CASE("the shipped example configs validate clean") {
  const std::string dir = test_util::configs_dir();
  for (const char* name :
       {"local_pair.json", "distributed.json", "combiner.json"}) {
    const PipelineConfig cfg = parse_config_file(dir + "/" + name);
    const auto issues = validate_config(cfg, KernelRegistry::global());
    CAPTURE(name);
    CHECK(issues.empty());
  }
}
