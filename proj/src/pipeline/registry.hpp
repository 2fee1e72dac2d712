#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "core/kernel.hpp"
#include "core/params.hpp"

namespace xrpipe::pipeline {

/// Maps registered kernel type names to port shapes and factories.
/// Developers register kernel types ahead of deployment; configs refer to
/// them by name.
class KernelRegistry {
 public:
  using Factory = std::function<std::unique_ptr<Kernel>(const ParamMap&)>;

  void add(std::string type, std::vector<PortDecl> ports, Factory factory);

  bool contains(std::string_view type) const;
  const std::vector<PortDecl>* ports(std::string_view type) const;
  std::unique_ptr<Kernel> make(std::string_view type, const ParamMap& params) const;

  std::vector<std::string> type_names() const;

  /// Process-wide registry with the builtin kernel types pre-registered:
  /// SyntheticFrameSource, Passthrough, Grayscale, Combiner, LatencySink.
  static KernelRegistry& global();

 private:
  struct Entry {
    std::vector<PortDecl> ports;
    Factory factory;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace xrpipe::pipeline
