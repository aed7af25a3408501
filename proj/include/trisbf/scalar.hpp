#pragma once

// Working-precision tiers. Every analytic evaluator is a template over one of
// these; callers start in binary64 and move up when the propagated error scale
// says the result is not trustworthy.

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/float128.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace trisbf {

using quad = boost::multiprecision::float128;
// Stack-allocated fixed-digit MPFR numbers: no heap traffic and no shared
// default-precision state between threads.
using mp50 = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<50, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;
using mp100 = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<100, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

enum class Tier { binary64 = 0, binary128 = 1, mpfr50 = 2, mpfr100 = 3 };
inline constexpr int tier_count = 4;

const char* tier_name(Tier t);

template <class T> struct tier_of;
template <> struct tier_of<double> { static constexpr Tier value = Tier::binary64; };
template <> struct tier_of<quad> { static constexpr Tier value = Tier::binary128; };
template <> struct tier_of<mp50> { static constexpr Tier value = Tier::mpfr50; };
template <> struct tier_of<mp100> { static constexpr Tier value = Tier::mpfr100; };

template <class T> inline double unit_roundoff() {
    return static_cast<double>(std::numeric_limits<T>::epsilon());
}

template <class T> inline int decimal_digits() {
    return std::numeric_limits<T>::digits10;
}

template <class T> inline double to_double(const T& x) { return static_cast<double>(x); }
template <> inline double to_double<double>(const double& x) { return x; }

// quad holds exact sums of a few doubles; split it into two doubles so the
// MPFR tiers receive the exact value too.
template <class T> inline T from_quad(const quad& q) {
    double hi = static_cast<double>(q);
    double lo = static_cast<double>(q - quad(hi));
    return T(hi) + T(lo);
}
template <> inline double from_quad<double>(const quad& q) { return static_cast<double>(q); }
template <> inline quad from_quad<quad>(const quad& q) { return q; }

template <class T> inline T pi() { return boost::math::constants::pi<T>(); }
template <class T> inline T root_pi() { return boost::math::constants::root_pi<T>(); }

// x^k for integer k (k may be negative); 0^0 = 1.
template <class T> T ipow(const T& x, int k) {
    if (k < 0) return T(1) / ipow(x, -k);
    T r(1), b(x);
    while (k) {
        if (k & 1) r *= b;
        k >>= 1;
        if (k) b *= b;
    }
    return r;
}

// Neumaier compensated sum.
template <class T> struct CompensatedSum {
    T sum{0}, c{0};
    void add(const T& x) {
        using std::fabs;
        T t = sum + x;
        if (fabs(sum) >= fabs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    T value() const { return sum + c; }
};

std::string format17(double x);

}  // namespace trisbf
