#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mkex/matrix.hpp"
#include "mkex/randgen.hpp"

namespace mkex {

// Key exchange over products of matrix polynomials. Each party owns two
// secret coefficient vectors (a, a~) and the peers share two public random
// matrices U and V. With P(X, c) = sum_m c_m * X^m / |X^m|_F the published
// value is A = P(W1, a) * P(W2, a~) and the shared secret matrix is
// S = P(W1, a) * PeerPub * P(W2, a~), where (W1, W2) is the canonical
// ordering of (U, V). Polynomials in the same matrix commute, so both sides
// arrive at the same S up to floating-point rounding; the secret bytes are
// taken from the significands, which absorb that rounding almost always.

struct PrivateKey {
    std::vector<Cplx> a;       // attaches to the canonically first matrix
    std::vector<Cplx> a_tilde; // attaches to the canonically second matrix
};

struct KeyPair {
    PrivateKey priv;
    CMatrix matrix_key;
};

struct SharedSecret {
    std::vector<std::uint8_t> bytes; // K = n^2 * 8
};

// Draw order is part of the contract: M1, then M1 coefficient pairs (real
// component before imaginary), then M2 and its pairs. M1, M2 are uniform on
// [n^2, 2*n^2 - 1]; components are symmetric_double() values in [-1, 1).
PrivateKey gen_private_key(SeededStream& s, std::size_t n);

// n^2 entries in column-major order, same per-entry scheme as coefficients.
CMatrix gen_matrix_public_key(SeededStream& s, std::size_t n);

// Private key first, then matrix key, from one stream.
KeyPair generate_keys(SeededStream& s, std::size_t n);

// Orders the two matrix public keys by their serialized bytes, larger first.
// Both parties apply the same rule, so the pair they compute with is
// identical no matter which argument came from whom. Throws
// "degenerate-keys" when the serializations are equal.
std::pair<CMatrix, CMatrix> canonical_order(const CMatrix& u, const CMatrix& v);

// P(x, c) = sum_{m=1..M} c_m * x^m / |x^m|_F, accumulated in ascending m.
CMatrix eval_poly_normalized(const CMatrix& x, std::span<const Cplx> coeffs);

// A = P(W1, a) * P(W2, a~).
CMatrix compute_public_key(const PrivateKey& priv, const CMatrix& u, const CMatrix& v);

// S = P(W1, a) * peer_pub * P(W2, a~), products left to right.
CMatrix compute_secret_matrix(const PrivateKey& priv, const CMatrix& u, const CMatrix& v,
                              const CMatrix& peer_pub);

// Top 32 significand-derived bits of one binary64 component: for x != 0 with
// |x| = f * 2^e, f in [1, 2), signed f maps to t = f - 1 (positive) or f + 2
// (negative) and then to floor(t * (2^32 - 1)). Zero maps to 0. The value is
// invariant under scaling by exact powers of two, which is what makes the
// extraction robust to accumulated rounding in the low mantissa bits.
std::uint32_t significand_u32(double component); // "nonfinite"

// K = n^2 * 8 bytes: per entry in column-major order, significand_u32 of the
// real then the imaginary component, each as 4 LE bytes.
SharedSecret extract_secret(const CMatrix& sm); // "nonfinite"

// Byte-wise equality; length mismatch compares unequal.
bool secrets_equal(const SharedSecret& x, const SharedSecret& y);

} // namespace mkex
