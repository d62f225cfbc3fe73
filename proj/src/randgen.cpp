#include "mkex/randgen.hpp"

#include <algorithm>
#include <random>

#include "mkex/bytes.hpp"
#include "mkex/error.hpp"

namespace mkex {

SeededStream::SeededStream(const Seed& seed) : seed_(seed) {}

SeededStream SeededStream::from_os_entropy() {
    std::random_device rd;
    Seed seed{};
    for (std::size_t i = 0; i < seed.size(); i += 4) {
        store_u32_le(rd(), std::span<std::uint8_t>(seed).subspan(i, 4));
    }
    return SeededStream(seed);
}

void SeededStream::fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
        if (pos_ == block_.size()) {
            std::array<std::uint8_t, 8> ctr{};
            store_u64_le(counter_, ctr);
            block_ = sha256_parts({std::span<const std::uint8_t>(seed_), ctr});
            ++counter_;
            pos_ = 0;
        }
        const std::size_t take = std::min(out.size() - done, block_.size() - pos_);
        std::copy_n(block_.begin() + static_cast<std::ptrdiff_t>(pos_), take,
                    out.begin() + static_cast<std::ptrdiff_t>(done));
        pos_ += take;
        done += take;
    }
}

std::uint32_t SeededStream::u31_from_le(std::span<const std::uint8_t> four_bytes) {
    return load_u32_le(four_bytes) & 0x7fffffffu;
}

std::uint32_t SeededStream::next_u31() {
    std::array<std::uint8_t, 4> raw{};
    fill(raw);
    return u31_from_le(raw);
}

double SeededStream::dense_from_draws(std::uint32_t r1, std::uint32_t r2) {
    // Both products are exact; the single rounding happens at the sum. At the
    // very top of the range the sum can round up to 1.0, so clamp to keep the
    // interval half-open.
    double d = static_cast<double>(r1) * 0x1p-31 + static_cast<double>(r2) * 0x1p-62;
    if (d >= 1.0) d = 0x1.fffffffffffffp-1;
    return d;
}

double SeededStream::dense_unit_double() {
    const std::uint32_t r1 = next_u31();
    const std::uint32_t r2 = next_u31();
    return dense_from_draws(r1, r2);
}

double SeededStream::symmetric_double() { return 2.0 * dense_unit_double() - 1.0; }

std::size_t SeededStream::length_in_range(std::size_t n2) {
    if (n2 == 0) throw Error("shape", "length range requires a positive base");
    return n2 + static_cast<std::size_t>(next_u31()) % n2;
}

SeededStream SeededStream::derive(std::string_view label) const {
    return SeededStream(sha256_parts({std::span<const std::uint8_t>(seed_), as_bytes(label)}));
}

} // namespace mkex
