#include <doctest.h>

#include <bit>
#include <cstdint>
#include <filesystem>

#include "mkex/bytes.hpp"
#include "mkex/error.hpp"
#include "mkex/keycodec.hpp"
#include "oracles.hpp"

using namespace mkex;

TEST_CASE("golden complex encodings") {
    CHECK(hex_dump(encode_cplx({0.8689850983830614, -0.8548606934416402})) ==
          "ea8748d6b9ceeb3f9df71ed0045bebbf\n");
    CHECK(hex_dump(encode_cplx({-0.2856153551337328, -0.08363623851402902})) ==
          "4c3a62a08547d2bf309f2d3d2f69b5bf\n");
    CHECK(hex_dump(encode_cplx({0.0, 0.0})) == "00000000000000000000000000000000\n");
}

TEST_CASE("golden decodings invert the encodings") {
    const Cplx c1 = decode_cplx(hex_parse("ea8748d6b9ceeb3f9df71ed0045bebbf"));
    CHECK(c1.re == 0.8689850983830614);
    CHECK(c1.im == -0.8548606934416402);
    const Cplx c2 = decode_cplx(hex_parse("4c3a62a08547d2bf309f2d3d2f69b5bf"));
    CHECK(c2.re == -0.2856153551337328);
    CHECK(c2.im == -0.08363623851402902);
    const Cplx zero = decode_cplx(hex_parse("00000000000000000000000000000000"));
    CHECK(zero == Cplx{0.0, 0.0});
}

TEST_CASE("non-finite values are rejected both ways") {
    CHECK_THROWS_WITH_AS(encode_cplx({std::numeric_limits<double>::infinity(), 0.0}),
                         doctest::Contains("nonfinite"), Error);
    CHECK_THROWS_WITH_AS(encode_cplx({0.0, std::numeric_limits<double>::quiet_NaN()}),
                         doctest::Contains("nonfinite"), Error);
    // 7ff0...0 is +inf in the real slot
    CHECK_THROWS_WITH_AS(decode_cplx(hex_parse("000000000000f07f0000000000000000")),
                         doctest::Contains("nonfinite"), Error);
    CHECK_THROWS_WITH_AS(decode_cplx(hex_parse("0100000000000000000000000000f0ff")),
                         doctest::Contains("nonfinite"), Error);
}

TEST_CASE("complex codec round-trips random bit patterns") {
    auto s = oracle::test_stream(0x10);
    int tested = 0;
    while (tested < 500) {
        std::array<std::uint8_t, 16> raw{};
        s.fill(raw);
        const double re = std::bit_cast<double>(load_u64_le(std::span(raw).first(8)));
        const double im = std::bit_cast<double>(load_u64_le(std::span(raw).subspan(8, 8)));
        if (!std::isfinite(re) || !std::isfinite(im)) continue;
        ++tested;
        const auto encoded = encode_cplx(decode_cplx(raw));
        CHECK(std::equal(encoded.begin(), encoded.end(), raw.begin()));
    }
}

TEST_CASE("matrix codec") {
    CMatrix one(1);
    one.at(0, 0) = {1.0, 0.0};
    CHECK(hex_dump(encode_matrix(one)) == "000000000000f03f0000000000000000\n");

    auto s = oracle::test_stream(0x11);
    const CMatrix m = oracle::random_matrix(s, 4);
    CHECK(decode_matrix(4, encode_matrix(m)) == m);

    for (std::size_t n = 1; n <= 8; ++n) {
        const CMatrix x = oracle::random_matrix(s, n);
        CHECK(encode_matrix(x).size() == n * n * 16);
    }

    CHECK_THROWS_WITH_AS(decode_matrix(2, std::vector<std::uint8_t>(63)),
                         doctest::Contains("shape"), Error);
}

TEST_CASE("appendix-style golden matrix entry") {
    // first entry of a published matrix key and its leading bytes
    const auto bytes = encode_cplx({0.3368737329532423, 0.5243043640910983});
    CHECK(hex_dump(bytes) == "68997ad8568fd53fa67b1df219c7e03f\n");
}

TEST_CASE("hex dump layout and parsing") {
    CHECK(hex_dump({}) == "");
    std::vector<std::uint8_t> b32(32, 0xab);
    const std::string d32 = hex_dump(b32);
    CHECK(d32.size() == 65);
    CHECK(d32.back() == '\n');

    std::vector<std::uint8_t> b384(384);
    for (std::size_t i = 0; i < b384.size(); ++i) b384[i] = static_cast<std::uint8_t>(i);
    const std::string d384 = hex_dump(b384);
    CHECK(std::count(d384.begin(), d384.end(), '\n') == 12);
    CHECK(hex_parse(d384) == b384);
    CHECK(hex_parse(hex_dump(b32)) == b32);
    CHECK(hex_parse("").empty());

    CHECK(hex_parse(" 0a\n0B\t0c ") == std::vector<std::uint8_t>{0x0a, 0x0b, 0x0c});
    CHECK_THROWS_WITH_AS(hex_parse("abc"), doctest::Contains("format"), Error);
    CHECK_THROWS_WITH_AS(hex_parse("zz"), doctest::Contains("format"), Error);
}

TEST_CASE("key file round trips") {
    auto s = oracle::test_stream(0x12);

    KeyFile matrix{KeyKind::matrix_pubkey, 4, 0, 0, encode_matrix(oracle::random_matrix(s, 4))};
    const KeyFile matrix_back = parse_key_file(serialize_key_file(matrix));
    CHECK(matrix_back.kind == KeyKind::matrix_pubkey);
    CHECK(matrix_back.n == 4);
    CHECK(matrix_back.payload == matrix.payload);

    KeyFile priv{KeyKind::private_coeffs, 4, 3, 2, std::vector<std::uint8_t>(5 * 16, 0x5a)};
    const KeyFile priv_back = parse_key_file(serialize_key_file(priv));
    CHECK(priv_back.m1 == 3);
    CHECK(priv_back.m2 == 2);
    CHECK(priv_back.payload == priv.payload);

    KeyFile secret{KeyKind::secret, 4, 0, 0, std::vector<std::uint8_t>(128, 0x01)};
    CHECK(parse_key_file(serialize_key_file(secret)).payload == secret.payload);

    const std::string text = serialize_key_file(matrix);
    CHECK(text.rfind("mkex/1 matrix-pubkey n=4 len=256\n", 0) == 0);
}

TEST_CASE("key file format violations") {
    CHECK_THROWS_WITH_AS(parse_key_file("bogus header\nabcd\n"), doctest::Contains("format"),
                         Error);
    CHECK_THROWS_WITH_AS(parse_key_file("mkex/1 matrix-pubkey n=2 len=3\nabcdef\n"),
                         doctest::Contains("format"), Error);
    // length consistent with header but wrong for the kind
    CHECK_THROWS_WITH_AS(parse_key_file("mkex/1 secret n=4 len=4\ndeadbeef\n"),
                         doctest::Contains("format"), Error);
    KeyFile bad{KeyKind::secret, 4, 0, 0, std::vector<std::uint8_t>(5)};
    CHECK_THROWS_WITH_AS(serialize_key_file(bad), doctest::Contains("format"), Error);
}

TEST_CASE("key files survive the filesystem") {
    const auto dir = std::filesystem::temp_directory_path() / "mkex-codec-test";
    std::filesystem::create_directories(dir);
    auto s = oracle::test_stream(0x13);
    const KeyFile file{KeyKind::pubkey, 3, 0, 0, encode_matrix(oracle::random_matrix(s, 3))};
    const auto path = dir / "roundtrip.mkx";
    save_key_file(path, file);
    const KeyFile back = load_key_file(path);
    CHECK(back.kind == KeyKind::pubkey);
    CHECK(back.payload == file.payload);
    CHECK_THROWS_WITH_AS(load_key_file(dir / "missing.mkx"), doctest::Contains("io"), Error);
    std::filesystem::remove_all(dir);
}
