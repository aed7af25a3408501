#pragma once

// Minimal complex type usable with any of the working-precision tiers and with
// Taylor jets; std::complex is unspecified for non-builtin scalars.

#include <cmath>

namespace trisbf {

template <class T> struct cplx {
    T re{0}, im{0};
    cplx() = default;
    cplx(const T& r) : re(r), im(0) {}
    cplx(const T& r, const T& i) : re(r), im(i) {}

    cplx& operator+=(const cplx& o) { re += o.re; im += o.im; return *this; }
    cplx& operator-=(const cplx& o) { re -= o.re; im -= o.im; return *this; }
    cplx& operator*=(const cplx& o) {
        T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    cplx& operator*=(const T& s) { re *= s; im *= s; return *this; }
    cplx& operator/=(const cplx& o) { *this = *this / o; return *this; }
    cplx& operator/=(const T& s) { re /= s; im /= s; return *this; }

    friend cplx operator+(cplx a, const cplx& b) { return a += b; }
    friend cplx operator-(cplx a, const cplx& b) { return a -= b; }
    friend cplx operator*(cplx a, const cplx& b) { return a *= b; }
    friend cplx operator*(cplx a, const T& s) { return a *= s; }
    friend cplx operator*(const T& s, cplx a) { return a *= s; }
    friend cplx operator/(cplx a, const T& s) { return a /= s; }
    friend cplx operator-(const cplx& a) { return cplx(-a.re, -a.im); }
    friend cplx operator/(const cplx& a, const cplx& b) {
        using std::fabs;
        // Smith's algorithm
        if (fabs(b.re) >= fabs(b.im)) {
            T r = b.im / b.re, d = b.re + b.im * r;
            return cplx((a.re + a.im * r) / d, (a.im - a.re * r) / d);
        }
        T r = b.re / b.im, d = b.re * r + b.im;
        return cplx((a.re * r + a.im) / d, (a.im * r - a.re) / d);
    }
};

template <class T> cplx<T> conj(const cplx<T>& z) { return cplx<T>(z.re, -z.im); }

template <class T> T abs(const cplx<T>& z) {
    using std::fabs;
    using std::sqrt;
    T a = fabs(z.re), b = fabs(z.im);
    if (a < b) std::swap(a, b);
    if (a == 0) return a;
    T r = b / a;
    return a * sqrt(T(1) + r * r);
}

template <class T> cplx<T> log(const cplx<T>& z) {
    using std::atan2;
    using std::log;
    return cplx<T>(log(abs(z)), atan2(z.im, z.re));
}

// principal branch
template <class T> cplx<T> sqrt(const cplx<T>& z) {
    using std::fabs;
    using std::sqrt;
    if (z.re == 0 && z.im == 0) return z;
    T m = abs(z);
    T t = sqrt((m + fabs(z.re)) / 2);
    if (z.re >= 0) return cplx<T>(t, z.im / (2 * t));
    return cplx<T>(fabs(z.im) / (2 * t), z.im >= 0 ? t : -t);
}

// (-i)^k for integer k
template <class T> cplx<T> minus_i_pow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return cplx<T>(T(1), T(0));
        case 1: return cplx<T>(T(0), T(-1));
        case 2: return cplx<T>(T(-1), T(0));
        default: return cplx<T>(T(0), T(1));
    }
}

}  // namespace trisbf
