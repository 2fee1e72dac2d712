#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace xrpipe {

enum class PixelFormat : std::uint8_t {
  rgb8 = 0,
  gray8 = 1,
  opaque = 255,  // raw bytes, no pixel semantics
};

/// Bytes per pixel; 0 for opaque payloads.
constexpr std::size_t bytes_per_pixel(PixelFormat f) {
  switch (f) {
    case PixelFormat::rgb8: return 3;
    case PixelFormat::gray8: return 1;
    case PixelFormat::opaque: return 0;
  }
  return 0;
}

std::string_view to_string(PixelFormat f);
std::optional<PixelFormat> pixel_format_from_string(std::string_view s);

struct FrameSpec {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  PixelFormat format = PixelFormat::opaque;

  /// Payload size implied by the geometry; 0 (unspecified) for opaque.
  std::size_t payload_size() const {
    return static_cast<std::size_t>(width) * height * bytes_per_pixel(format);
  }

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }

  bool operator==(const FrameSpec&) const = default;
};

struct Resolution {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};

/// Accepts the named resolutions (720p, 1080p, 1440p, 2160p) or "WxH".
std::optional<Resolution> parse_resolution(std::string_view s);

/// Short display name: the standard name when one matches, else "WxH".
std::string resolution_name(std::uint32_t width, std::uint32_t height);

}  // namespace xrpipe
