#include "mkex/protocol.hpp"

#include <cmath>

#include "mkex/bytes.hpp"
#include "mkex/error.hpp"
#include "mkex/keycodec.hpp"

namespace mkex {

namespace {

Cplx draw_component_pair(SeededStream& s) {
    const double re = s.symmetric_double();
    const double im = s.symmetric_double();
    return {re, im};
}

std::vector<Cplx> draw_coeff_vector(SeededStream& s, std::size_t n2) {
    const std::size_t m = s.length_in_range(n2);
    std::vector<Cplx> coeffs(m);
    for (Cplx& c : coeffs) c = draw_component_pair(s);
    return coeffs;
}

} // namespace

PrivateKey gen_private_key(SeededStream& s, std::size_t n) {
    if (n < 2) throw Error("shape", "key generation requires n >= 2");
    PrivateKey key;
    key.a = draw_coeff_vector(s, n * n);
    key.a_tilde = draw_coeff_vector(s, n * n);
    return key;
}

CMatrix gen_matrix_public_key(SeededStream& s, std::size_t n) {
    if (n < 2) throw Error("shape", "key generation requires n >= 2");
    CMatrix m(n);
    for (Cplx& e : m.data()) e = draw_component_pair(s);
    return m;
}

KeyPair generate_keys(SeededStream& s, std::size_t n) {
    PrivateKey priv = gen_private_key(s, n);
    CMatrix matrix_key = gen_matrix_public_key(s, n);
    return {std::move(priv), std::move(matrix_key)};
}

std::pair<CMatrix, CMatrix> canonical_order(const CMatrix& u, const CMatrix& v) {
    const std::vector<std::uint8_t> ub = encode_matrix(u);
    const std::vector<std::uint8_t> vb = encode_matrix(v);
    if (ub == vb) throw Error("degenerate-keys", "matrix public keys serialize identically");
    if (ub > vb) return {u, v};
    return {v, u};
}

CMatrix eval_poly_normalized(const CMatrix& x, std::span<const Cplx> coeffs) {
    CMatrix acc(x.n());
    if (coeffs.empty()) return acc;
    NormalizedPowerStream powers(x);
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
        add_scaled(acc, coeffs[m], powers.current());
        if (m + 1 < coeffs.size()) powers.advance();
    }
    return acc;
}

CMatrix compute_public_key(const PrivateKey& priv, const CMatrix& u, const CMatrix& v) {
    const auto [w1, w2] = canonical_order(u, v);
    return mat_mul(eval_poly_normalized(w1, priv.a), eval_poly_normalized(w2, priv.a_tilde));
}

CMatrix compute_secret_matrix(const PrivateKey& priv, const CMatrix& u, const CMatrix& v,
                              const CMatrix& peer_pub) {
    if (peer_pub.n() != u.n() || u.n() != v.n())
        throw Error("shape", "peer public key has mismatched dimensions");
    const auto [w1, w2] = canonical_order(u, v);
    const CMatrix left = mat_mul(eval_poly_normalized(w1, priv.a), peer_pub);
    return mat_mul(left, eval_poly_normalized(w2, priv.a_tilde));
}

std::uint32_t significand_u32(double component) {
    if (!std::isfinite(component)) throw Error("nonfinite", "secret component is not finite");
    if (component == 0.0) return 0;
    int exponent = 0;
    const double f = std::frexp(component, &exponent) * 2.0; // signed, |f| in [1, 2)
    const double t = (f > 0.0) ? f - 1.0 : f + 2.0;
    return static_cast<std::uint32_t>(t * 4294967295.0);
}

SharedSecret extract_secret(const CMatrix& sm) {
    SharedSecret secret;
    secret.bytes.resize(sm.size() * 8);
    std::size_t off = 0;
    for (const Cplx& e : sm.data()) {
        store_u32_le(significand_u32(e.re), std::span<std::uint8_t>(secret.bytes).subspan(off, 4));
        store_u32_le(significand_u32(e.im),
                     std::span<std::uint8_t>(secret.bytes).subspan(off + 4, 4));
        off += 8;
    }
    return secret;
}

bool secrets_equal(const SharedSecret& x, const SharedSecret& y) { return x.bytes == y.bytes; }

} // namespace mkex
