#include "core/frame.hpp"

#include <array>
#include <charconv>

namespace xrpipe {

namespace {

struct NamedRes {
  std::string_view name;
  Resolution res;
};

constexpr std::array<NamedRes, 4> kNamed{{
    {"720p", {1280, 720}},
    {"1080p", {1920, 1080}},
    {"1440p", {2560, 1440}},
    {"2160p", {3840, 2160}},
}};

std::optional<std::uint32_t> parse_u32(std::string_view s) {
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v == 0) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(PixelFormat f) {
  switch (f) {
    case PixelFormat::rgb8: return "rgb8";
    case PixelFormat::gray8: return "gray8";
    case PixelFormat::opaque: return "opaque";
  }
  return "?";
}

std::optional<PixelFormat> pixel_format_from_string(std::string_view s) {
  if (s == "rgb8") return PixelFormat::rgb8;
  if (s == "gray8") return PixelFormat::gray8;
  if (s == "opaque") return PixelFormat::opaque;
  return std::nullopt;
}

std::optional<Resolution> parse_resolution(std::string_view s) {
  for (const auto& n : kNamed) {
    if (s == n.name) return n.res;
  }
  const auto x = s.find('x');
  if (x == std::string_view::npos) return std::nullopt;
  const auto w = parse_u32(s.substr(0, x));
  const auto h = parse_u32(s.substr(x + 1));
  if (!w || !h) return std::nullopt;
  return Resolution{*w, *h};
}

std::string resolution_name(std::uint32_t width, std::uint32_t height) {
  for (const auto& n : kNamed) {
    if (n.res.width == width && n.res.height == height)
      return std::string(n.name);
  }
  return std::to_string(width) + "x" + std::to_string(height);
}

}  // namespace xrpipe
