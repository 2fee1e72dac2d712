#include "remote/rle.hpp"

#include "core/error.hpp"

namespace xrpipe::remote {

std::vector<std::uint8_t> rle_compress(std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out;
  out.reserve(data.size() / 2 + 8);
  std::size_t i = 0;
  while (i < data.size()) {
    const std::uint8_t value = data[i];
    std::size_t run = 1;
    while (run < 255 && i + run < data.size() && data[i + run] == value) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.push_back(value);
    i += run;
  }
  return out;
}

std::vector<std::uint8_t> rle_decompress(std::span<const std::uint8_t> data) {
  if (data.size() % 2 != 0)
    raise(Errc::malformed_stream, "rle stream has odd length");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < data.size(); i += 2) {
    const std::uint8_t count = data[i];
    if (count == 0) raise(Errc::malformed_stream, "rle run count is zero");
    out.insert(out.end(), count, data[i + 1]);
  }
  return out;
}

}  // namespace xrpipe::remote
