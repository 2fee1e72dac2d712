#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace xrpipe::remote {

/// Byte-level run-length encoding: a stream of (count, value) pairs with
/// count in 1..255. Lossless; output is at most twice the input length,
/// hitting the bound exactly when no two adjacent bytes are equal.
std::vector<std::uint8_t> rle_compress(std::span<const std::uint8_t> data);

/// Inverse of rle_compress. Raises MALFORMED_STREAM on odd-length input or
/// a zero count byte.
std::vector<std::uint8_t> rle_decompress(std::span<const std::uint8_t> data);

}  // namespace xrpipe::remote
