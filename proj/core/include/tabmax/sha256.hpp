#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace tabmax {

/// FIPS 180-4 SHA-256 of a byte buffer, as a 64-char lowercase hex digest.
std::string sha256_hex(std::span<const std::uint8_t> data);

/// Convenience overload for text buffers.
std::string sha256_hex(const std::string& data);

}  // namespace tabmax
