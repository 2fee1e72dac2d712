#pragma once

#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "core/error.hpp"

namespace xrpipe {

using ParamValue = std::variant<std::int64_t, double, std::string, bool>;

/// Scalar key/value parameters from a kernel declaration.
class ParamMap {
 public:
  ParamMap() = default;

  void set(std::string key, ParamValue v) { values_[std::move(key)] = std::move(v); }
  bool has(std::string_view key) const { return values_.count(std::string(key)) > 0; }

  std::int64_t get_int(std::string_view key, std::int64_t fallback) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return fallback;
    if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    if (const auto* v = std::get_if<double>(&it->second))
      return static_cast<std::int64_t>(*v);
    raise(Errc::invalid_argument, "param '" + std::string(key) + "' must be a number");
  }

  double get_double(std::string_view key, double fallback) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return fallback;
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&it->second))
      return static_cast<double>(*v);
    raise(Errc::invalid_argument, "param '" + std::string(key) + "' must be a number");
  }

  std::string get_string(std::string_view key, std::string fallback) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return fallback;
    if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
    raise(Errc::invalid_argument, "param '" + std::string(key) + "' must be a string");
  }

  /// Rejects keys outside the allowed set (typo guard for config files).
  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, _] : values_) {
      bool ok = false;
      for (const auto allowed : keys)
        if (k == allowed) ok = true;
      if (!ok) raise(Errc::invalid_argument, "unknown param '" + k + "'");
    }
  }

  const std::map<std::string, ParamValue>& values() const { return values_; }

 private:
  std::map<std::string, ParamValue> values_;
};

}  // namespace xrpipe
