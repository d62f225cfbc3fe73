#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mkex/matrix.hpp"

namespace mkex {

// Byte-stable serialization of key material. One complex value is 16 bytes:
// 8 LE bytes of the binary64 real part followed by 8 LE bytes of the
// imaginary part. Matrices and coefficient vectors walk indices 0..len-1 in
// storage (column-major) order. The layout must not change: golden vectors
// and cross-host key files depend on it.

std::array<std::uint8_t, 16> encode_cplx(Cplx c);       // "nonfinite"
Cplx decode_cplx(std::span<const std::uint8_t> bytes);  // "shape", "nonfinite"

std::vector<std::uint8_t> encode_matrix(const CMatrix& m);
CMatrix decode_matrix(std::size_t n, std::span<const std::uint8_t> bytes); // "shape"

std::vector<std::uint8_t> encode_coeffs(std::span<const Cplx> coeffs);
std::vector<Cplx> decode_coeffs(std::span<const std::uint8_t> bytes); // "shape"

// Lowercase hex, 32 bytes (64 chars) per line. hex_parse ignores all
// whitespace; odd digit counts or other characters raise "format".
std::string hex_dump(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_parse(std::string_view text);

// On-disk .mkx container: one UTF-8 header line, then the payload as a hex
// dump. Header shape:
//   mkex/1 <kind> n=<N> len=<payload bytes>
// with kind one of private-coeffs | matrix-pubkey | pubkey | secret.
// private-coeffs additionally carries m1=<M1> m2=<M2> so the two coefficient
// vectors can be split back apart (payload is a||a~, (M1+M2)*16 bytes).
enum class KeyKind { private_coeffs, matrix_pubkey, pubkey, secret };

std::string_view key_kind_name(KeyKind kind);
KeyKind key_kind_from_name(std::string_view name); // "format"

struct KeyFile {
    KeyKind kind{};
    std::size_t n = 0;
    std::size_t m1 = 0; // private-coeffs only
    std::size_t m2 = 0; // private-coeffs only
    std::vector<std::uint8_t> payload;
};

// Payload length must match the kind (private-coeffs (m1+m2)*16, matrix and
// pubkey n^2*16, secret n^2*8); violations raise "format".
std::string serialize_key_file(const KeyFile& file);
KeyFile parse_key_file(std::string_view text);

void save_key_file(const std::filesystem::path& path, const KeyFile& file); // "io"
KeyFile load_key_file(const std::filesystem::path& path);                   // "io", "format"

} // namespace mkex
