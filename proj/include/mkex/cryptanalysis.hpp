#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mkex/matrix.hpp"
#include "mkex/protocol.hpp"
#include "mkex/randgen.hpp"

namespace mkex {

// Eavesdropper's view: U, V, A, B are public. A is a bilinear combination of
// the normalized power products W1^m * W2^n, so writing those products as
// columns turns recovery of the coefficient products into an ordinary linear
// system Psi * alpha = vec(A). Any alpha reproducing A also reproduces the
// shared secret, because S = P(W1,a) * B * P(W2,a~) depends on the private
// vectors only through that same combination. Every power of an n x n matrix
// lies in the span of its first n powers, so degree D = n already suffices
// regardless of how long the private coefficient vectors are.

struct LinearSystem {
    std::size_t n = 0;      // matrix side length
    std::size_t degree = 0; // D: powers 1..D of each matrix
    // basis[k] = vec(W1^m * W2^n), k = (m-1)*D + (n-1), vec = column stacking
    std::vector<std::vector<Cplx>> basis;
    std::vector<Cplx> target; // vec(A)
};

// Applies the protocol's canonical ordering to (u, v) internally, so the
// caller may pass the public matrices in either order.
LinearSystem build_system(const CMatrix& u, const CMatrix& v, const CMatrix& a_pub,
                          std::size_t degree);

struct LsqSolution {
    std::vector<Cplx> alpha;
    double residual = 0.0;      // |Psi*alpha - target|_2
    double cond_estimate = 0.0; // cheap estimate from the Cholesky diagonal
    double ridge_used = 0.0;
};

// Solves (Psi^H Psi + ridge*I) alpha = Psi^H target by complex Cholesky.
// ridge < 0 selects the default 1e-12 * trace(Psi^H Psi) / D^2. A failed
// factorization retries with ridge*10 up to 3 times, then raises "singular".
LsqSolution solve_least_squares(const LinearSystem& sys, double ridge = -1.0);

// S_eve = sum_{m,n} alpha_{mn} * W1^m * B * W2^n (normalized powers,
// canonical order applied to (u, v) internally).
CMatrix recover_secret(const CMatrix& u, const CMatrix& v, const CMatrix& b_pub,
                       std::span<const Cplx> alpha, std::size_t degree); // "shape"

struct AttackTrial {
    std::size_t index = 0;
    double residual = 0.0;
    double relative_error = 0.0; // |S_eve - S|_F / |S|_F
    double cond_estimate = 0.0;
    bool exact_key = false;      // extracted bytes equal the parties' secret
    bool approx_match = false;   // relative_error <= 1e-6
};

struct AttackSummary {
    std::size_t n = 0;
    std::size_t degree = 0;
    std::vector<AttackTrial> trials;
    std::size_t exact_hits = 0;
    std::size_t approx_hits = 0;
    double median_residual = 0.0;
    double median_cond = 0.0;
};

enum class AttackMode {
    exchange, // fresh random protocol runs
    planted,  // single-term private keys with degree <= D (consistent system)
};

// Runs `trials` independent instances, attacking each with the given degree
// (0 selects D = n). Trial i draws from the base stream's "trial-<i>" child,
// so results do not depend on execution order.
AttackSummary attack_report(std::size_t trials, std::size_t n, std::size_t degree,
                            const SeededStream& base, AttackMode mode = AttackMode::exchange);

std::string format_attack_table(const AttackSummary& summary);
std::string attack_csv(const AttackSummary& summary);

} // namespace mkex
