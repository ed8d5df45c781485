#include "tabmax/base64.hpp"

#include <array>

namespace tabmax {

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<std::int8_t, 256> build_reverse() {
    std::array<std::int8_t, 256> rev;
    rev.fill(-1);
    for (int i = 0; i < 64; ++i) rev[static_cast<unsigned char>(kAlphabet[i])] = std::int8_t(i);
    return rev;
}

const std::array<std::int8_t, 256> kReverse = build_reverse();

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        std::uint32_t v = (std::uint32_t(data[i]) << 16) | (std::uint32_t(data[i + 1]) << 8) |
                          data[i + 2];
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back(kAlphabet[v & 63]);
    }
    std::size_t rem = data.size() - i;
    if (rem == 1) {
        std::uint32_t v = std::uint32_t(data[i]) << 16;
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rem == 2) {
        std::uint32_t v = (std::uint32_t(data[i]) << 16) | (std::uint32_t(data[i + 1]) << 8);
        out.push_back(kAlphabet[(v >> 18) & 63]);
        out.push_back(kAlphabet[(v >> 12) & 63]);
        out.push_back(kAlphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> base64_decode_strict(const std::string& text) {
    if (text.empty() || text.size() % 4 != 0) return std::nullopt;

    std::size_t pad = 0;
    if (text.back() == '=') {
        pad = 1;
        if (text.size() >= 2 && text[text.size() - 2] == '=') pad = 2;
    }
    std::size_t body = text.size() - pad;
    for (std::size_t i = 0; i < body; ++i) {
        if (kReverse[static_cast<unsigned char>(text[i])] < 0) return std::nullopt;
    }

    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i + 4 <= text.size(); i += 4) {
        bool last = (i + 4 == text.size());
        std::uint32_t v = 0;
        int chars = 4;
        if (last && pad) chars = 4 - int(pad);
        if (chars < 2) return std::nullopt;
        for (int k = 0; k < chars; ++k) {
            v = (v << 6) | std::uint32_t(kReverse[static_cast<unsigned char>(text[i + k])]);
        }
        if (!last || pad == 0) {
            out.push_back(std::uint8_t(v >> 16));
            out.push_back(std::uint8_t(v >> 8));
            out.push_back(std::uint8_t(v));
        } else if (pad == 1) {
            // 3 chars -> 18 bits -> 2 bytes; the low 2 filler bits must be 0.
            if (v & 0x3) return std::nullopt;
            v <<= 6;
            out.push_back(std::uint8_t(v >> 16));
            out.push_back(std::uint8_t(v >> 8));
        } else {
            // 2 chars -> 12 bits -> 1 byte; the low 4 filler bits must be 0.
            if (v & 0xF) return std::nullopt;
            v <<= 12;
            out.push_back(std::uint8_t(v >> 16));
        }
    }
    return out;
}

}  // namespace tabmax
