#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "mkex/hash.hpp"

namespace mkex {

// Deterministic byte stream: block k is SHA-256(seed || k as 8 LE bytes),
// k counting up from 0. One seed fixes the entire sequence, so every key,
// matrix and downstream artifact derived from it is reproducible bit for
// bit. Single-owner mutable object; copy it to fork an identical stream.
class SeededStream {
public:
    using Seed = std::array<std::uint8_t, 32>;

    explicit SeededStream(const Seed& seed);

    // Seeded from the operating-system entropy source.
    static SeededStream from_os_entropy();

    const Seed& seed() const noexcept { return seed_; }

    void fill(std::span<std::uint8_t> out);

    // Consumes 4 bytes LE and masks the top bit: uniform on [0, 2^31 - 1].
    std::uint32_t next_u31();

    // Dense double in [0, 1): two u31 draws packed as r1*2^-31 + r2*2^-62,
    // filling the full 53-bit significand.
    double dense_unit_double();

    // 2 * dense_unit_double() - 1, in [-1, 1).
    double symmetric_double();

    // n2 + (next_u31 mod n2), uniform-ish on [n2, 2*n2 - 1].
    std::size_t length_in_range(std::size_t n2);

    // Independent child stream with seed SHA-256(seed || label).
    SeededStream derive(std::string_view label) const;

    // Pure arithmetic behind the draws, split out for direct testing.
    static std::uint32_t u31_from_le(std::span<const std::uint8_t> four_bytes);
    static double dense_from_draws(std::uint32_t r1, std::uint32_t r2);

private:
    Seed seed_;
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 32> block_{};
    std::size_t pos_ = sizeof(block_); // empty; first fill generates block 0
};

} // namespace mkex
