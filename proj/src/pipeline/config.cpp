#include "pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "pipeline/registry.hpp"

namespace xrpipe::pipeline {

using nlohmann::json;

std::string_view to_string(Placement p) {
  return p == Placement::client ? "client" : "server";
}

std::string_view to_string(ValidationCode c) {
  switch (c) {
    case ValidationCode::placement_violation: return "PLACEMENT_VIOLATION";
    case ValidationCode::edge_kind_mismatch: return "EDGE_KIND_MISMATCH";
    case ValidationCode::not_a_dag: return "NOT_A_DAG";
    case ValidationCode::unknown_kernel_type: return "UNKNOWN_KERNEL_TYPE";
    case ValidationCode::dangling_port: return "DANGLING_PORT";
    case ValidationCode::port_multiply_driven: return "PORT_MULTIPLY_DRIVEN";
  }
  return "?";
}

const KernelDecl* PipelineConfig::find_kernel(std::string_view name) const {
  for (const auto& k : kernels)
    if (k.name == name) return &k;
  return nullptr;
}

namespace {

[[noreturn]] void parse_fail(const std::string& what) {
  raise(Errc::parse_error, what);
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      parse_fail("unknown field '" + key + "' in " + where);
  }
}

std::string require_string(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.contains(key))
    parse_fail("missing field '" + std::string(key) + "' in " + where);
  if (!obj[key].is_string())
    parse_fail("field '" + std::string(key) + "' in " + where +
               " must be a string");
  return obj[key].get<std::string>();
}

PortRef parse_port_ref(const std::string& s, const std::string& where) {
  const auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
    parse_fail("endpoint '" + s + "' in " + where +
               " must be 'kernel.port'");
  return {s.substr(0, dot), s.substr(dot + 1)};
}

ParamMap parse_params(const json& obj, const std::string& where) {
  ParamMap params;
  for (const auto& [key, value] : obj.items()) {
    if (value.is_string())
      params.set(key, value.get<std::string>());
    else if (value.is_boolean())
      params.set(key, value.get<bool>());
    else if (value.is_number_integer())
      params.set(key, value.get<std::int64_t>());
    else if (value.is_number_float())
      params.set(key, value.get<double>());
    else
      parse_fail("param '" + key + "' in " + where + " must be a scalar");
  }
  return params;
}

KernelDecl parse_kernel(const json& obj, std::size_t index) {
  const std::string where = "kernels[" + std::to_string(index) + "]";
  if (!obj.is_object()) parse_fail(where + " must be an object");
  reject_unknown_keys(obj, where, {"name", "type", "placement", "params"});

  KernelDecl k;
  k.name = require_string(obj, "name", where);
  k.type = require_string(obj, "type", where);
  const std::string placement = require_string(obj, "placement", where);
  if (placement == "client")
    k.placement = Placement::client;
  else if (placement == "server")
    k.placement = Placement::server;
  else
    parse_fail("placement in " + where + " must be 'client' or 'server'");
  if (obj.contains("params")) {
    if (!obj["params"].is_object())
      parse_fail("params in " + where + " must be an object");
    k.params = parse_params(obj["params"], where);
  }
  return k;
}

EdgeDecl parse_edge(const json& obj, std::size_t index) {
  const std::string where = "edges[" + std::to_string(index) + "]";
  if (!obj.is_object()) parse_fail(where + " must be an object");
  reject_unknown_keys(obj, where,
                      {"from", "to", "kind", "sync", "capacity", "policy",
                       "codec", "transport"});

  EdgeDecl e;
  e.from = parse_port_ref(require_string(obj, "from", where), where);
  e.to = parse_port_ref(require_string(obj, "to", where), where);

  const std::string kind = require_string(obj, "kind", where);
  if (kind == "local")
    e.kind = EdgeKind::local;
  else if (kind == "remote")
    e.kind = EdgeKind::remote;
  else
    parse_fail("kind in " + where + " must be 'local' or 'remote'");

  if (obj.contains("sync")) {
    const std::string sync = obj["sync"].get<std::string>();
    if (sync == "blocking")
      e.sync = SyncMode::blocking;
    else if (sync == "non_blocking")
      e.sync = SyncMode::non_blocking;
    else
      parse_fail("sync in " + where + " must be 'blocking' or 'non_blocking'");
  }

  if (e.kind == EdgeKind::local) {
    for (const char* banned : {"codec", "transport"})
      if (obj.contains(banned))
        parse_fail(std::string("'") + banned + "' is not allowed on local " +
                   where);
    if (obj.contains("capacity")) {
      if (!obj["capacity"].is_number_integer() ||
          obj["capacity"].get<std::int64_t>() < 1)
        parse_fail("capacity in " + where + " must be a positive integer");
      e.capacity = obj["capacity"].get<std::size_t>();
    }
    if (obj.contains("policy")) {
      const std::string policy = obj["policy"].get<std::string>();
      if (policy == "block")
        e.policy = OverflowPolicy::block;
      else if (policy == "drop_oldest")
        e.policy = OverflowPolicy::drop_oldest;
      else
        parse_fail("policy in " + where + " must be 'block' or 'drop_oldest'");
    }
  } else {
    for (const char* banned : {"capacity", "policy"})
      if (obj.contains(banned))
        parse_fail(std::string("'") + banned + "' is not allowed on remote " +
                   where);
    if (obj.contains("codec")) {
      const auto codec = remote::codec_from_string(obj["codec"].get<std::string>());
      if (!codec) parse_fail("codec in " + where + " must be 'raw' or 'rle'");
      e.codec = *codec;
    }
    if (!obj.contains("transport"))
      parse_fail("remote " + where + " needs a transport");
    const json& t = obj["transport"];
    if (!t.is_object()) parse_fail("transport in " + where + " must be an object");
    reject_unknown_keys(t, "transport of " + where, {"listen", "connect"});
    try {
      if (t.contains("listen"))
        e.listen_addr = remote::Addr::parse(t["listen"].get<std::string>());
      if (t.contains("connect"))
        e.connect_addr = remote::Addr::parse(t["connect"].get<std::string>());
    } catch (const Error& err) {
      parse_fail("transport of " + where + ": " + err.what());
    }
    if (!e.listen_addr && !e.connect_addr)
      parse_fail("transport of " + where + " needs 'listen' or 'connect'");
    // One address is enough on a flat network; mirror it.
    if (!e.listen_addr) e.listen_addr = e.connect_addr;
    if (!e.connect_addr) e.connect_addr = e.listen_addr;
  }
  return e;
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

PipelineConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("syntax error at line " +
               std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) parse_fail("config root must be an object");
  reject_unknown_keys(doc, "config", {"kernels", "edges"});
  if (!doc.contains("kernels") || !doc["kernels"].is_array())
    parse_fail("config needs a 'kernels' array");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    parse_fail("config needs an 'edges' array");

  PipelineConfig cfg;
  try {
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc["kernels"].size(); ++i) {
      KernelDecl k = parse_kernel(doc["kernels"][i], i);
      if (!names.insert(k.name).second)
        raise(Errc::duplicate_name, "kernel '" + k.name + "' declared twice");
      cfg.kernels.push_back(std::move(k));
    }
    for (std::size_t i = 0; i < doc["edges"].size(); ++i)
      cfg.edges.push_back(parse_edge(doc["edges"][i], i));
  } catch (const json::exception& e) {
    parse_fail(e.what());  // wrong value type somewhere in the document
  }
  return cfg;
}

PipelineConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

struct PortIndex {
  // kernel -> declared ports (only for kernels whose type is known)
  std::map<std::string, const std::vector<PortDecl>*> ports;

  const PortDecl* find(const PortRef& ref) const {
    auto it = ports.find(ref.kernel);
    if (it == ports.end() || !it->second) return nullptr;
    for (const auto& p : *it->second)
      if (p.name == ref.port) return &p;
    return nullptr;
  }

  bool kernel_known(const std::string& name) const {
    auto it = ports.find(name);
    return it != ports.end() && it->second != nullptr;
  }
};

bool has_cycle(const PipelineConfig& cfg, std::string& cycle_note) {
  // Kahn's algorithm over kernel names.
  std::map<std::string, std::set<std::string>> out_edges;
  std::map<std::string, std::size_t> in_degree;
  for (const auto& k : cfg.kernels) in_degree[k.name] = 0;
  for (const auto& e : cfg.edges) {
    if (!in_degree.count(e.from.kernel) || !in_degree.count(e.to.kernel))
      continue;  // dangling endpoints reported separately
    if (out_edges[e.from.kernel].insert(e.to.kernel).second)
      ++in_degree[e.to.kernel];
  }
  std::vector<std::string> queue;
  for (const auto& [name, deg] : in_degree)
    if (deg == 0) queue.push_back(name);
  std::size_t visited = 0;
  while (!queue.empty()) {
    const std::string name = queue.back();
    queue.pop_back();
    ++visited;
    for (const auto& next : out_edges[name])
      if (--in_degree[next] == 0) queue.push_back(next);
  }
  if (visited == in_degree.size()) return false;
  std::vector<std::string> stuck;
  for (const auto& [name, deg] : in_degree)
    if (deg > 0) stuck.push_back(name);
  std::ostringstream os;
  os << "cycle through {";
  for (std::size_t i = 0; i < stuck.size(); ++i)
    os << (i ? ", " : "") << stuck[i];
  os << "}";
  cycle_note = os.str();
  return true;
}

}  // namespace

std::vector<ValidationIssue> validate_config(const PipelineConfig& cfg,
                                             const KernelRegistry& registry) {
  std::vector<ValidationIssue> issues;
  auto report = [&](ValidationCode code, std::string msg) {
    issues.push_back({code, std::move(msg)});
  };

  PortIndex index;
  for (const auto& k : cfg.kernels) {
    if (!registry.contains(k.type)) {
      report(ValidationCode::unknown_kernel_type,
             "kernel '" + k.name + "' has unregistered type '" + k.type + "'");
      index.ports[k.name] = nullptr;
    } else {
      index.ports[k.name] = registry.ports(k.type);
    }
  }

  // Edge endpoints must resolve to a declared OUT -> IN pair.
  struct Driven {
    std::size_t count = 0;
  };
  std::map<std::string, Driven> driven;     // "kernel.port" of IN endpoints
  std::set<std::string> feeding;            // OUT ports with >=1 edge
  for (std::size_t i = 0; i < cfg.edges.size(); ++i) {
    const auto& e = cfg.edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";

    auto resolve = [&](const PortRef& ref, Direction want,
                       const char* side) -> bool {
      if (!cfg.find_kernel(ref.kernel)) {
        report(ValidationCode::dangling_port,
               where + " " + side + " references unknown kernel '" +
                   ref.kernel + "'");
        return false;
      }
      if (!index.kernel_known(ref.kernel)) return false;  // type unknown
      const PortDecl* port = index.find(ref);
      if (!port || port->dir != want) {
        report(ValidationCode::dangling_port,
               where + " " + side + " references no " +
                   (want == Direction::out ? "OUT" : "IN") + " port '" +
                   ref.str() + "'");
        return false;
      }
      return true;
    };

    if (resolve(e.from, Direction::out, "from")) feeding.insert(e.from.str());
    if (resolve(e.to, Direction::in, "to")) ++driven[e.to.str()].count;

    // kind must match the endpoints' placements
    const KernelDecl* from_k = cfg.find_kernel(e.from.kernel);
    const KernelDecl* to_k = cfg.find_kernel(e.to.kernel);
    if (from_k && to_k) {
      const bool crosses = from_k->placement != to_k->placement;
      if (crosses && e.kind == EdgeKind::local)
        report(ValidationCode::edge_kind_mismatch,
               where + " is local but crosses " +
                   std::string(to_string(from_k->placement)) + "->" +
                   std::string(to_string(to_k->placement)));
      if (!crosses && e.kind == EdgeKind::remote)
        report(ValidationCode::edge_kind_mismatch,
               where + " is remote but both ends are on " +
                   std::string(to_string(from_k->placement)));
    }
  }

  for (const auto& [port, d] : driven) {
    if (d.count > 1)
      report(ValidationCode::port_multiply_driven,
             "IN port '" + port + "' has " + std::to_string(d.count) +
                 " incoming edges");
  }

  // Every declared port must be wired: IN exactly once, OUT at least once.
  for (const auto& k : cfg.kernels) {
    const auto* ports = index.ports[k.name];
    if (!ports) continue;
    for (const auto& p : *ports) {
      const std::string ref = k.name + "." + p.name;
      if (p.dir == Direction::in && !driven.count(ref))
        report(ValidationCode::dangling_port,
               "IN port '" + ref + "' has no incoming edge");
      if (p.dir == Direction::out && !feeding.count(ref))
        report(ValidationCode::dangling_port,
               "OUT port '" + ref + "' has no outgoing edge");
    }
  }

  // Sources and sinks live on the client device.
  for (const auto& k : cfg.kernels) {
    const auto* ports = index.ports[k.name];
    if (!ports) continue;
    bool has_in = false, has_out = false;
    for (const auto& p : *ports)
      (p.dir == Direction::in ? has_in : has_out) = true;
    if (k.placement == Placement::client) continue;
    if (!has_in)
      report(ValidationCode::placement_violation,
             "source kernel '" + k.name + "' must be placed on client");
    else if (!has_out)
      report(ValidationCode::placement_violation,
             "sink kernel '" + k.name + "' must be placed on client");
  }

  std::string cycle_note;
  if (has_cycle(cfg, cycle_note))
    report(ValidationCode::not_a_dag, cycle_note);

  return issues;
}

}  // namespace xrpipe::pipeline
