#include <doctest.h>

#include <array>
#include <cstdint>

#include "mkex/hash.hpp"
#include "mkex/keycodec.hpp"
#include "mkex/randgen.hpp"
#include "oracles.hpp"

using namespace mkex;

TEST_CASE("sha256 known vectors") {
    CHECK(hex_dump(sha256(as_bytes(""))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855\n");
    CHECK(hex_dump(sha256(as_bytes("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad\n");
}

TEST_CASE("u31 masks the top bit") {
    CHECK(SeededStream::u31_from_le(std::array<std::uint8_t, 4>{0, 0, 0, 0}) == 0);
    CHECK(SeededStream::u31_from_le(std::array<std::uint8_t, 4>{0xff, 0xff, 0xff, 0xff}) ==
          2147483647u);
    CHECK(SeededStream::u31_from_le(std::array<std::uint8_t, 4>{0x00, 0x00, 0x00, 0x80}) == 0);
}

TEST_CASE("stream blocks follow the hash counter construction") {
    auto s = oracle::test_stream(0x00);
    std::array<std::uint8_t, 64> got{};
    s.fill(got);

    const SeededStream::Seed seed{}; // all zero
    std::array<std::uint8_t, 8> ctr0{};
    std::array<std::uint8_t, 8> ctr1{};
    ctr1[0] = 1;
    const Digest block0 = sha256_parts({std::span<const std::uint8_t>(seed), ctr0});
    const Digest block1 = sha256_parts({std::span<const std::uint8_t>(seed), ctr1});
    for (std::size_t i = 0; i < 32; ++i) {
        CHECK(got[i] == block0[i]);
        CHECK(got[32 + i] == block1[i]);
    }
}

TEST_CASE("identical seeds give identical streams") {
    auto a = oracle::test_stream(0x11);
    auto b = oracle::test_stream(0x11);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u31() == b.next_u31());

    auto c = oracle::test_stream(0x11);
    auto d = c; // forked copy continues identically
    for (int i = 0; i < 10; ++i) CHECK(c.dense_unit_double() == d.dense_unit_double());
}

TEST_CASE("derived streams differ from the parent and each other") {
    auto base = oracle::test_stream(0x22);
    auto left = base.derive("left");
    auto right = base.derive("right");
    CHECK(left.seed() != right.seed());
    CHECK(left.seed() != base.seed());
    CHECK(base.derive("left").seed() == left.seed());
}

TEST_CASE("dense double packing") {
    CHECK(SeededStream::dense_from_draws(0, 0) == 0.0);
    CHECK(SeededStream::dense_from_draws(1u << 30, 0) == 0.5);
    CHECK(SeededStream::dense_from_draws(1, 1) == 0x1p-31 + 0x1p-62);
    // extreme draws would round to 1.0; the clamp keeps the interval open
    const double top = SeededStream::dense_from_draws(0x7fffffffu, 0x7fffffffu);
    CHECK(top < 1.0);
}

TEST_CASE("symmetric double is an affine image of the dense draw") {
    auto s = oracle::test_stream(0x33);
    auto fork = s;
    for (int i = 0; i < 50; ++i) {
        const double expected = 2.0 * s.dense_unit_double() - 1.0;
        CHECK(fork.symmetric_double() == expected);
    }
}

TEST_CASE("draw ranges hold") {
    auto s = oracle::test_stream(0x44);
    for (int i = 0; i < 10000; ++i) {
        const double d = s.dense_unit_double();
        CHECK(d >= 0.0);
        CHECK(d < 1.0);
        const double y = s.symmetric_double();
        CHECK(y >= -1.0);
        CHECK(y < 1.0);
    }
}

TEST_CASE("dense draws have the right mean") {
    auto s = oracle::test_stream(0x55);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) sum += s.dense_unit_double();
    const double mean = sum / 100000.0;
    CHECK(mean >= 0.49);
    CHECK(mean <= 0.51);
}

TEST_CASE("length_in_range matches its formula and bounds") {
    auto s = oracle::test_stream(0x66);
    auto fork = s;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t expected = 16 + fork.next_u31() % 16;
        const std::size_t got = s.length_in_range(16);
        CHECK(got == expected);
        CHECK(got >= 16);
        CHECK(got <= 31);
    }
    // the three boundary cases of the formula itself
    CHECK(16 + 0 % 16 == 16);
    CHECK(16 + 15 % 16 == 31);
    CHECK(16 + 33 % 16 == 17);
}

TEST_CASE("os entropy streams are distinct") {
    auto a = SeededStream::from_os_entropy();
    auto b = SeededStream::from_os_entropy();
    CHECK(a.seed() != b.seed());
}
