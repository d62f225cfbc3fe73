#pragma once

#include <cstdint>
#include <span>

namespace mkex {

// Little-endian integer packing shared by the codec, the secret extraction
// and the wire framing.

inline void store_u32_le(std::uint32_t v, std::span<std::uint8_t> out) {
    out[0] = static_cast<std::uint8_t>(v);
    out[1] = static_cast<std::uint8_t>(v >> 8);
    out[2] = static_cast<std::uint8_t>(v >> 16);
    out[3] = static_cast<std::uint8_t>(v >> 24);
}

inline std::uint32_t load_u32_le(std::span<const std::uint8_t> in) {
    return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
           (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

inline void store_u64_le(std::uint64_t v, std::span<std::uint8_t> out) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint64_t load_u64_le(std::span<const std::uint8_t> in) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
    return v;
}

inline void store_u16_le(std::uint16_t v, std::span<std::uint8_t> out) {
    out[0] = static_cast<std::uint8_t>(v);
    out[1] = static_cast<std::uint8_t>(v >> 8);
}

inline std::uint16_t load_u16_le(std::span<const std::uint8_t> in) {
    return static_cast<std::uint16_t>(static_cast<std::uint16_t>(in[0]) |
                                      (static_cast<std::uint16_t>(in[1]) << 8));
}

} // namespace mkex
