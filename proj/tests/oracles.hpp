#pragma once

// Independent reference implementations used as test oracles. These must not
// share code paths with the library: products use a different loop order and
// accumulation structure, and normalized powers are formed by repeated full
// products followed by a single normalization.

#include <cstddef>
#include <vector>

#include "mkex/matrix.hpp"
#include "mkex/randgen.hpp"

namespace oracle {

inline mkex::CMatrix naive_mat_mul(const mkex::CMatrix& x, const mkex::CMatrix& y) {
    const std::size_t n = x.n();
    mkex::CMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const mkex::Cplx xv = x.at(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                r.at(i, j) += xv * y.at(k, j);
            }
        }
    }
    return r;
}

// X^m by m-fold repeated product, then one division by the Frobenius norm.
inline mkex::CMatrix naive_power_normalized(const mkex::CMatrix& x, std::size_t m) {
    mkex::CMatrix p = x;
    for (std::size_t i = 1; i < m; ++i) p = naive_mat_mul(p, x);
    const double norm = mkex::frobenius_norm(p);
    mkex::CMatrix out(x.n());
    for (std::size_t idx = 0; idx < p.size(); ++idx) out.data()[idx] = p.data()[idx] / norm;
    return out;
}

// sum_m c_m * X^m / |X^m|_F with every power built from scratch.
inline mkex::CMatrix naive_eval_poly(const mkex::CMatrix& x, const std::vector<mkex::Cplx>& c) {
    mkex::CMatrix acc(x.n());
    for (std::size_t m = 0; m < c.size(); ++m) {
        const mkex::CMatrix p = naive_power_normalized(x, m + 1);
        for (std::size_t idx = 0; idx < acc.size(); ++idx) {
            acc.data()[idx] += c[m] * p.data()[idx];
        }
    }
    return acc;
}

inline mkex::CMatrix random_matrix(mkex::SeededStream& s, std::size_t n) {
    mkex::CMatrix m(n);
    for (mkex::Cplx& e : m.data()) {
        const double re = s.symmetric_double();
        const double im = s.symmetric_double();
        e = {re, im};
    }
    return m;
}

inline std::vector<mkex::Cplx> random_coeffs(mkex::SeededStream& s, std::size_t count) {
    std::vector<mkex::Cplx> c(count);
    for (mkex::Cplx& e : c) {
        const double re = s.symmetric_double();
        const double im = s.symmetric_double();
        e = {re, im};
    }
    return c;
}

inline double relative_diff(const mkex::CMatrix& a, const mkex::CMatrix& b) {
    mkex::CMatrix diff = a;
    mkex::add_scaled(diff, {-1.0, 0.0}, b);
    const double denom = mkex::frobenius_norm(a);
    return denom > 0.0 ? mkex::frobenius_norm(diff) / denom : mkex::frobenius_norm(diff);
}

inline mkex::SeededStream test_stream(std::uint8_t tag) {
    mkex::SeededStream::Seed seed{};
    seed.fill(tag);
    return mkex::SeededStream(seed);
}

} // namespace oracle
