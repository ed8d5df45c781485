#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tabmax {

/// Canonical base64 encoding with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> data);

/// Strict decode: length % 4 == 0, padding only at the end, and the unused
/// bits of the final quantum must be zero so encode(decode(s)) == s.
std::optional<std::vector<std::uint8_t>> base64_decode_strict(const std::string& text);

inline bool is_base64_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '+' || c == '/';
}

}  // namespace tabmax
