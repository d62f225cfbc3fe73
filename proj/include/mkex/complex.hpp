#pragma once

#include <cmath>

namespace mkex {

// Complex number over two binary64 components. Arithmetic is spelled out
// term by term so every build evaluates it in the same order; together with
// -ffp-contract=off this keeps derived key bytes identical across builds.
struct Cplx {
    double re = 0.0;
    double im = 0.0;

    constexpr Cplx() = default;
    constexpr Cplx(double r, double i) : re(r), im(i) {}

    constexpr Cplx& operator+=(Cplx b) {
        re += b.re;
        im += b.im;
        return *this;
    }

    friend constexpr Cplx operator+(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
    friend constexpr Cplx operator-(Cplx a, Cplx b) { return {a.re - b.re, a.im - b.im}; }

    friend constexpr Cplx operator*(Cplx a, Cplx b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }

    friend constexpr Cplx operator*(double s, Cplx a) { return {s * a.re, s * a.im}; }
    friend constexpr Cplx operator/(Cplx a, double s) { return {a.re / s, a.im / s}; }

    friend constexpr bool operator==(Cplx a, Cplx b) = default;
};

constexpr Cplx conj(Cplx a) { return {a.re, -a.im}; }

// Squared modulus, |a|^2 = re^2 + im^2.
constexpr double abs2(Cplx a) { return a.re * a.re + a.im * a.im; }

inline bool is_finite(Cplx a) { return std::isfinite(a.re) && std::isfinite(a.im); }

} // namespace mkex
