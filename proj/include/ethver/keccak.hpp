#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

#include "ethver/hex.hpp"

namespace ethver {

namespace detail {

inline constexpr std::array<std::uint64_t, 24> kKeccakRc = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// rho rotation offsets, state indexed as lane[x + 5*y]
inline constexpr std::array<int, 25> kKeccakRho = {
    0,  1,  62, 28, 27,
    36, 44, 6,  55, 20,
    3,  10, 43, 25, 39,
    41, 45, 15, 21, 8,
    18, 2,  61, 56, 14,
};

inline constexpr std::uint64_t rotl64(std::uint64_t v, int n) {
    return n == 0 ? v : (v << n) | (v >> (64 - n));
}

inline void keccak_f1600(std::array<std::uint64_t, 25>& a) {
    for (int round = 0; round < 24; ++round) {
        // theta
        std::uint64_t c[5];
        for (int x = 0; x < 5; ++x) {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for (int x = 0; x < 5; ++x) {
            const std::uint64_t d = c[(x + 4) % 5] ^ rotl64(c[(x + 1) % 5], 1);
            for (int y = 0; y < 25; y += 5) a[x + y] ^= d;
        }
        // rho + pi
        std::uint64_t b[25];
        for (int x = 0; x < 5; ++x) {
            for (int y = 0; y < 5; ++y) {
                b[y + 5 * ((2 * x + 3 * y) % 5)] = rotl64(a[x + 5 * y], kKeccakRho[x + 5 * y]);
            }
        }
        // chi
        for (int y = 0; y < 25; y += 5) {
            for (int x = 0; x < 5; ++x) {
                a[x + y] = b[x + y] ^ (~b[(x + 1) % 5 + y] & b[(x + 2) % 5 + y]);
            }
        }
        // iota
        a[0] ^= kKeccakRc[round];
    }
}

} // namespace detail

/// Keccak-256 (the original padding, as used on Ethereum — not SHA3-256).
inline std::array<std::uint8_t, 32> keccak256(std::span<const std::uint8_t> data) {
    constexpr std::size_t rate = 136; // 1088-bit rate, 512-bit capacity
    std::array<std::uint64_t, 25> state{};

    const auto absorb = [&](const std::uint8_t* block) {
        for (std::size_t i = 0; i < rate / 8; ++i) {
            std::uint64_t lane = 0;
            for (int j = 7; j >= 0; --j) lane = (lane << 8) | block[8 * i + j];
            state[i] ^= lane;
        }
        detail::keccak_f1600(state);
    };

    std::size_t offset = 0;
    while (data.size() - offset >= rate) {
        absorb(data.data() + offset);
        offset += rate;
    }

    std::array<std::uint8_t, rate> last{};
    const std::size_t tail = data.size() - offset;
    if (tail > 0) std::memcpy(last.data(), data.data() + offset, tail);
    last[tail] ^= 0x01;
    last[rate - 1] ^= 0x80;
    absorb(last.data());

    std::array<std::uint8_t, 32> digest;
    for (std::size_t i = 0; i < 4; ++i) {
        for (int j = 0; j < 8; ++j) {
            digest[8 * i + j] = static_cast<std::uint8_t>(state[i] >> (8 * j));
        }
    }
    return digest;
}

inline std::array<std::uint8_t, 32> keccak256(std::string_view text) {
    return keccak256(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

using Selector = std::array<std::uint8_t, 4>;

/// First four bytes of Keccak-256 over a canonical signature, e.g.
/// "transfer(address,uint256)" -> a9059cbb.
inline Selector selector_of(std::string_view canonical_signature) {
    const auto digest = keccak256(canonical_signature);
    return {digest[0], digest[1], digest[2], digest[3]};
}

inline std::string selector_hex(const Selector& s) {
    return bytes_to_hex(s.data(), s.size());
}

} // namespace ethver
