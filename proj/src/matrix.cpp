#include "mkex/matrix.hpp"

#include <cmath>
#include <utility>

#include "mkex/error.hpp"

namespace mkex {

CMatrix::CMatrix(std::size_t n) : n_(n), data_(n * n) {
    if (n == 0) throw Error("shape", "matrix side length must be positive");
}

CMatrix::CMatrix(std::size_t n, std::vector<Cplx> data) : n_(n), data_(std::move(data)) {
    if (n == 0) throw Error("shape", "matrix side length must be positive");
    if (data_.size() != n * n) throw Error("shape", "matrix data length does not match n*n");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = {1.0, 0.0};
    return m;
}

CMatrix mat_mul(const CMatrix& x, const CMatrix& y) {
    if (x.n() != y.n()) throw Error("shape", "matrix product requires equal side lengths");
    const std::size_t n = x.n();
    CMatrix r(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            Cplx acc{};
            for (std::size_t k = 0; k < n; ++k) {
                acc += x.at(i, k) * y.at(k, j);
            }
            r.at(i, j) = acc;
        }
    }
    return r;
}

double frobenius_norm(const CMatrix& x) {
    double sum = 0.0;
    for (const Cplx& e : x.data()) sum += abs2(e);
    return std::sqrt(sum);
}

bool is_finite(const CMatrix& x) {
    for (const Cplx& e : x.data()) {
        if (!is_finite(e)) return false;
    }
    return true;
}

void add_scaled(CMatrix& acc, Cplx c, const CMatrix& m) {
    if (acc.n() != m.n()) throw Error("shape", "accumulation requires equal side lengths");
    std::span<Cplx> out = acc.data();
    std::span<const Cplx> in = m.data();
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += c * in[idx];
}

namespace {

// Divides by the Frobenius norm in place; reports the degenerate/overflow
// conditions attached to the power stream.
void normalize(CMatrix& m) {
    const double norm = frobenius_norm(m);
    if (norm == 0.0) throw Error("degenerate", "matrix power has zero Frobenius norm");
    if (!std::isfinite(norm)) throw Error("overflow", "matrix power has non-finite Frobenius norm");
    for (Cplx& e : m.data()) e = e / norm;
    if (!is_finite(m)) throw Error("overflow", "normalized matrix power is not finite");
}

} // namespace

NormalizedPowerStream::NormalizedPowerStream(const CMatrix& x) : base_(x), current_(x) {
    normalize(current_);
}

void NormalizedPowerStream::advance() {
    current_ = mat_mul(current_, base_);
    normalize(current_);
}

std::vector<CMatrix> normalized_powers(const CMatrix& x, std::size_t count) {
    std::vector<CMatrix> out;
    out.reserve(count);
    NormalizedPowerStream stream(x);
    for (std::size_t m = 0; m < count; ++m) {
        out.push_back(stream.current());
        if (m + 1 < count) stream.advance();
    }
    return out;
}

} // namespace mkex
