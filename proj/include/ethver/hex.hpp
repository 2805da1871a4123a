#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ethver/errors.hpp"

namespace ethver {

inline bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

inline std::string_view strip_0x(std::string_view s) {
    if (s.size() >= 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) return s.substr(2);
    return s;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Lowercase "0x"-prefixed form, or nullopt if not a hex string of `digits` chars.
inline std::optional<std::string> normalize_hex(std::string_view raw, std::size_t digits) {
    auto body = strip_0x(raw);
    if (body.size() != digits) return std::nullopt;
    if (!std::all_of(body.begin(), body.end(), is_hex_digit)) return std::nullopt;
    return "0x" + to_lower(body);
}

inline std::string normalize_address(std::string_view raw) {
    auto a = normalize_hex(raw, 40);
    if (!a) throw ParseError("malformed address: " + std::string(raw));
    return *a;
}

inline std::string normalize_tx_hash(std::string_view raw) {
    auto h = normalize_hex(raw, 64);
    if (!h) throw ParseError("malformed transaction hash: " + std::string(raw));
    return *h;
}

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw ParseError(std::string("invalid hex digit '") + c + "'");
}

/// Accepts with or without "0x". Odd-length input is a ParseError.
inline std::vector<std::uint8_t> hex_to_bytes(std::string_view hex) {
    auto body = strip_0x(hex);
    if (body.size() % 2 != 0) throw ParseError("odd-length hex string");
    std::vector<std::uint8_t> out;
    out.reserve(body.size() / 2);
    for (std::size_t i = 0; i < body.size(); i += 2) {
        out.push_back(static_cast<std::uint8_t>(hex_nibble(body[i]) * 16 + hex_nibble(body[i + 1])));
    }
    return out;
}

inline std::string bytes_to_hex(const std::uint8_t* data, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0x0f]);
    }
    return out;
}

template <typename Container>
std::string bytes_to_hex(const Container& c) {
    return bytes_to_hex(c.data(), c.size());
}

} // namespace ethver
