#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mkex/complex.hpp"

namespace mkex {

// Dense N x N complex matrix in column-major order: entry (i, j) lives at
// data[j*n + i]. The storage order doubles as the serialization order and
// as the vec() order used by the linear-system attack, so it is fixed here
// once and never re-derived elsewhere.
class CMatrix {
public:
    explicit CMatrix(std::size_t n);
    CMatrix(std::size_t n, std::vector<Cplx> data);

    static CMatrix identity(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return data_.size(); }

    Cplx& at(std::size_t i, std::size_t j) { return data_[j * n_ + i]; }
    const Cplx& at(std::size_t i, std::size_t j) const { return data_[j * n_ + i]; }

    std::span<Cplx> data() noexcept { return data_; }
    std::span<const Cplx> data() const noexcept { return data_; }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

private:
    std::size_t n_;
    std::vector<Cplx> data_;
};

// Standard product x*y. The inner accumulation runs over the shared index in
// ascending order; changing that order changes low bits and breaks key
// reproducibility. Throws "shape" on dimension mismatch.
CMatrix mat_mul(const CMatrix& x, const CMatrix& y);

// sqrt of the sum of |entry|^2 over indices 0..n^2-1 in ascending order.
double frobenius_norm(const CMatrix& x);

bool is_finite(const CMatrix& x);

// acc += c * m, entrywise in ascending index order.
void add_scaled(CMatrix& acc, Cplx c, const CMatrix& m);

// Iterates the unit-Frobenius-norm powers of X:
//   p_1 = X / |X|_F,  p_{m+1} = (p_m * X) / |p_m * X|_F.
// Scalar factors cancel, so p_m equals X^m / |X^m|_F up to rounding while the
// running value never leaves [~1/|X|, |X|] in magnitude. Throws "degenerate"
// when a power vanishes (zero or nilpotent input) and "overflow" when an
// intermediate stops being finite.
class NormalizedPowerStream {
public:
    explicit NormalizedPowerStream(const CMatrix& x);

    // p_m for the current m (starts at m = 1).
    const CMatrix& current() const noexcept { return current_; }

    // Advances to p_{m+1}.
    void advance();

private:
    CMatrix base_;
    CMatrix current_;
};

// First `count` elements of the stream, p_1 .. p_count.
std::vector<CMatrix> normalized_powers(const CMatrix& x, std::size_t count);

} // namespace mkex
