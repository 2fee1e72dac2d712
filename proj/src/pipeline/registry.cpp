#include "pipeline/registry.hpp"

#include "core/error.hpp"
#include "kernels/builtin.hpp"

namespace xrpipe::pipeline {

void KernelRegistry::add(std::string type, std::vector<PortDecl> ports,
                         Factory factory) {
  entries_[std::move(type)] = Entry{std::move(ports), std::move(factory)};
}

bool KernelRegistry::contains(std::string_view type) const {
  return entries_.find(type) != entries_.end();
}

const std::vector<PortDecl>* KernelRegistry::ports(std::string_view type) const {
  auto it = entries_.find(type);
  return it == entries_.end() ? nullptr : &it->second.ports;
}

std::unique_ptr<Kernel> KernelRegistry::make(std::string_view type,
                                             const ParamMap& params) const {
  auto it = entries_.find(type);
  if (it == entries_.end())
    raise(Errc::unknown_kernel_type, "kernel type '" + std::string(type) + "'");
  return it->second.factory(params);
}

std::vector<std::string> KernelRegistry::type_names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& [name, _] : entries_) names.push_back(name);
  return names;
}

KernelRegistry& KernelRegistry::global() {
  static KernelRegistry reg = [] {
    using namespace xrpipe::kernels;
    KernelRegistry r;
    r.add("SyntheticFrameSource", {{"out", Direction::out}},
          [](const ParamMap& p) {
            return std::make_unique<SyntheticFrameSource>(
                SourceParams::from_map(p));
          });
    r.add("Passthrough",
          {{"in", Direction::in}, {"out", Direction::out}},
          [](const ParamMap& p) {
            p.allow_only({});
            return std::make_unique<Passthrough>();
          });
    r.add("Grayscale",
          {{"in", Direction::in}, {"out", Direction::out}},
          [](const ParamMap& p) {
            p.allow_only({});
            return std::make_unique<Grayscale>();
          });
    r.add("Combiner",
          {{"a", Direction::in}, {"b", Direction::in}, {"out", Direction::out}},
          [](const ParamMap& p) {
            p.allow_only({});
            return std::make_unique<Combiner>();
          });
    r.add("LatencySink", {{"in", Direction::in}},
          [](const ParamMap& p) {
            p.allow_only({"dump"});
            return std::make_unique<LatencySink>(p.get_string("dump", ""));
          });
    return r;
  }();
  return reg;
}

}  // namespace xrpipe::pipeline
