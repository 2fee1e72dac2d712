#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/channel.hpp"
#include "core/params.hpp"
#include "remote/socket.hpp"
#include "remote/wire.hpp"

namespace xrpipe::pipeline {

enum class Placement : std::uint8_t { client = 0, server = 1 };

std::string_view to_string(Placement p);

struct KernelDecl {
  std::string name;
  std::string type;
  Placement placement = Placement::client;
  ParamMap params;
};

struct PortRef {
  std::string kernel;
  std::string port;

  std::string str() const { return kernel + "." + port; }
  bool operator==(const PortRef&) const = default;
};

enum class EdgeKind : std::uint8_t { local = 0, remote = 1 };

struct EdgeDecl {
  PortRef from;
  PortRef to;
  EdgeKind kind = EdgeKind::local;
  SyncMode sync = SyncMode::blocking;
  // local edges
  std::size_t capacity = 8;
  OverflowPolicy policy = OverflowPolicy::block;
  // remote edges
  remote::CodecId codec = remote::CodecId::raw;
  std::optional<remote::Addr> listen_addr;
  std::optional<remote::Addr> connect_addr;
};

struct PipelineConfig {
  std::vector<KernelDecl> kernels;
  std::vector<EdgeDecl> edges;

  const KernelDecl* find_kernel(std::string_view name) const;
};

/// Parses the JSON deployment document (see docs/config.md). Unknown fields
/// and malformed values raise PARSE_ERROR; duplicate kernel names raise
/// DUPLICATE_NAME. Defaults: capacity=8, policy=block, sync=blocking,
/// codec=raw.
PipelineConfig parse_config(const std::string& text);
PipelineConfig parse_config_file(const std::string& path);

enum class ValidationCode {
  placement_violation,
  edge_kind_mismatch,
  not_a_dag,
  unknown_kernel_type,
  dangling_port,
  port_multiply_driven,
};

std::string_view to_string(ValidationCode c);

struct ValidationIssue {
  ValidationCode code;
  std::string message;
};

class KernelRegistry;

/// Checks every config invariant and reports all violations (not just the
/// first). Empty result means the config is runnable.
std::vector<ValidationIssue> validate_config(const PipelineConfig& cfg,
                                             const KernelRegistry& registry);

}  // namespace xrpipe::pipeline
