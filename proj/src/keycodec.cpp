#include "mkex/keycodec.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mkex/bytes.hpp"
#include "mkex/error.hpp"

namespace mkex {

namespace {

void encode_double(double v, std::span<std::uint8_t> out8) {
    store_u64_le(std::bit_cast<std::uint64_t>(v), out8);
}

double decode_double(std::span<const std::uint8_t> in8) {
    return std::bit_cast<double>(load_u64_le(in8));
}

} // namespace

std::array<std::uint8_t, 16> encode_cplx(Cplx c) {
    if (!is_finite(c)) throw Error("nonfinite", "cannot encode non-finite complex value");
    std::array<std::uint8_t, 16> out{};
    encode_double(c.re, std::span<std::uint8_t>(out).first(8));
    encode_double(c.im, std::span<std::uint8_t>(out).subspan(8, 8));
    return out;
}

Cplx decode_cplx(std::span<const std::uint8_t> bytes) {
    if (bytes.size() != 16) throw Error("shape", "complex value is 16 bytes");
    Cplx c{decode_double(bytes.first(8)), decode_double(bytes.subspan(8, 8))};
    if (!is_finite(c)) throw Error("nonfinite", "decoded complex value is not finite");
    return c;
}

std::vector<std::uint8_t> encode_matrix(const CMatrix& m) {
    std::vector<std::uint8_t> out(m.size() * 16);
    std::size_t off = 0;
    for (const Cplx& e : m.data()) {
        const auto bytes = encode_cplx(e);
        std::copy(bytes.begin(), bytes.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
        off += 16;
    }
    return out;
}

CMatrix decode_matrix(std::size_t n, std::span<const std::uint8_t> bytes) {
    if (n == 0 || bytes.size() != n * n * 16)
        throw Error("shape", "matrix payload length does not match n^2 * 16");
    std::vector<Cplx> data(n * n);
    for (std::size_t idx = 0; idx < data.size(); ++idx) {
        data[idx] = decode_cplx(bytes.subspan(idx * 16, 16));
    }
    return CMatrix(n, std::move(data));
}

std::vector<std::uint8_t> encode_coeffs(std::span<const Cplx> coeffs) {
    std::vector<std::uint8_t> out(coeffs.size() * 16);
    for (std::size_t idx = 0; idx < coeffs.size(); ++idx) {
        const auto bytes = encode_cplx(coeffs[idx]);
        std::copy(bytes.begin(), bytes.end(), out.begin() + static_cast<std::ptrdiff_t>(idx * 16));
    }
    return out;
}

std::vector<Cplx> decode_coeffs(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % 16 != 0) throw Error("shape", "coefficient payload is not a multiple of 16");
    std::vector<Cplx> out(bytes.size() / 16);
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        out[idx] = decode_cplx(bytes.subspan(idx * 16, 16));
    }
    return out;
}

std::string hex_dump(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2 + bytes.size() / 32 + 1);
    for (std::size_t idx = 0; idx < bytes.size(); ++idx) {
        if (idx != 0 && idx % 32 == 0) out.push_back('\n');
        out.push_back(digits[bytes[idx] >> 4]);
        out.push_back(digits[bytes[idx] & 0x0f]);
    }
    if (!bytes.empty()) out.push_back('\n');
    return out;
}

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::vector<std::uint8_t> hex_parse(std::string_view text) {
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 2);
    int pending = -1;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        const int v = hex_value(c);
        if (v < 0) throw Error("format", "invalid hex character");
        if (pending < 0) {
            pending = v;
        } else {
            out.push_back(static_cast<std::uint8_t>((pending << 4) | v));
            pending = -1;
        }
    }
    if (pending >= 0) throw Error("format", "odd number of hex digits");
    return out;
}

std::string_view key_kind_name(KeyKind kind) {
    switch (kind) {
        case KeyKind::private_coeffs: return "private-coeffs";
        case KeyKind::matrix_pubkey: return "matrix-pubkey";
        case KeyKind::pubkey: return "pubkey";
        case KeyKind::secret: return "secret";
    }
    throw Error("format", "unknown key kind");
}

KeyKind key_kind_from_name(std::string_view name) {
    if (name == "private-coeffs") return KeyKind::private_coeffs;
    if (name == "matrix-pubkey") return KeyKind::matrix_pubkey;
    if (name == "pubkey") return KeyKind::pubkey;
    if (name == "secret") return KeyKind::secret;
    throw Error("format", "unknown key kind '" + std::string(name) + "'");
}

namespace {

void validate_key_file(const KeyFile& file) {
    if (file.n < 1) throw Error("format", "key file requires n >= 1");
    std::size_t expected = 0;
    switch (file.kind) {
        case KeyKind::private_coeffs:
            if (file.m1 == 0 || file.m2 == 0)
                throw Error("format", "private-coeffs requires m1 and m2");
            expected = (file.m1 + file.m2) * 16;
            break;
        case KeyKind::matrix_pubkey:
        case KeyKind::pubkey:
            expected = file.n * file.n * 16;
            break;
        case KeyKind::secret:
            expected = file.n * file.n * 8;
            break;
    }
    if (file.payload.size() != expected)
        throw Error("format", "payload length does not match key kind");
}

std::size_t parse_field(std::string_view token, std::string_view key) {
    if (token.substr(0, key.size()) != key)
        throw Error("format", "expected header field '" + std::string(key) + "'");
    const std::string value(token.substr(key.size()));
    std::size_t parsed = 0;
    std::size_t used = 0;
    try {
        parsed = std::stoull(value, &used);
    } catch (const std::exception&) {
        throw Error("format", "bad numeric header field");
    }
    if (used != value.size()) throw Error("format", "bad numeric header field");
    return parsed;
}

} // namespace

std::string serialize_key_file(const KeyFile& file) {
    validate_key_file(file);
    std::ostringstream out;
    out << "mkex/1 " << key_kind_name(file.kind) << " n=" << file.n;
    if (file.kind == KeyKind::private_coeffs) out << " m1=" << file.m1 << " m2=" << file.m2;
    out << " len=" << file.payload.size() << "\n";
    out << hex_dump(file.payload);
    return out.str();
}

KeyFile parse_key_file(std::string_view text) {
    const std::size_t eol = text.find('\n');
    if (eol == std::string_view::npos) throw Error("format", "missing key file header");
    std::istringstream header{std::string(text.substr(0, eol))};
    std::string magic, kind_name;
    if (!(header >> magic >> kind_name) || magic != "mkex/1")
        throw Error("format", "not a mkex/1 key file");

    KeyFile file;
    file.kind = key_kind_from_name(kind_name);
    std::string token;
    if (!(header >> token)) throw Error("format", "missing n field");
    file.n = parse_field(token, "n=");
    if (file.kind == KeyKind::private_coeffs) {
        if (!(header >> token)) throw Error("format", "missing m1 field");
        file.m1 = parse_field(token, "m1=");
        if (!(header >> token)) throw Error("format", "missing m2 field");
        file.m2 = parse_field(token, "m2=");
    }
    if (!(header >> token)) throw Error("format", "missing len field");
    const std::size_t len = parse_field(token, "len=");
    if (header >> token) throw Error("format", "trailing header fields");

    file.payload = hex_parse(text.substr(eol + 1));
    if (file.payload.size() != len) throw Error("format", "payload length disagrees with header");
    validate_key_file(file);
    return file;
}

void save_key_file(const std::filesystem::path& path, const KeyFile& file) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
    out << serialize_key_file(file);
    if (!out) throw Error("io", "failed writing '" + path.string() + "'");
}

KeyFile load_key_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io", "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_file(buf.str());
}

} // namespace mkex
