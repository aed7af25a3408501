#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "trisbf/error.hpp"

namespace testing {

inline double rel_diff(double a, double b) {
    double s = std::max(std::fabs(a), std::fabs(b));
    return s == 0 ? 0 : std::fabs(a - b) / s;
}

inline double rel_diff(std::complex<double> a, std::complex<double> b) {
    double s = std::max(std::abs(a), std::abs(b));
    return s == 0 ? 0 : std::abs(a - b) / s;
}

// kind of the trisbf::Error thrown by fn, or nullopt-like sentinel -1
template <class F> int thrown_kind(F&& fn) {
    try {
        fn();
    } catch (const trisbf::Error& e) {
        return static_cast<int>(e.kind());
    }
    return -1;
}

inline int kind(trisbf::ErrorKind k) { return static_cast<int>(k); }

}  // namespace testing
