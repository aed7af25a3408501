#pragma once

#include <type_traits>

#include "trisbf/scalar.hpp"
#include "trisbf/types.hpp"

namespace trisbf::detail {

// Calls fn(std::type_identity<T>{}, is_last_tier) for each tier allowed by the
// policy, lowest first, until fn returns true. Returns the tier that stopped.
template <class Fn> Tier run_tiers(const PrecisionPolicy& policy, Fn&& fn) {
    int lo = static_cast<int>(policy.lowest_tier);
    int hi = static_cast<int>(policy.highest_tier);
    for (int t = lo; t <= hi; ++t) {
        bool last = t == hi;
        bool done = false;
        switch (t) {
            case 0: done = fn(std::type_identity<double>{}, last); break;
            case 1: done = fn(std::type_identity<quad>{}, last); break;
            case 2: done = fn(std::type_identity<mp50>{}, last); break;
            default: done = fn(std::type_identity<mp100>{}, last); break;
        }
        if (done) return static_cast<Tier>(t);
    }
    return policy.highest_tier;
}

// error estimate from an accumulated scale
template <class T> double rounding_error(double scale) { return 4.0 * scale * unit_roundoff<T>(); }

inline bool accurate_enough(double value, double err, double tol) {
    return err <= tol * std::fabs(value) || err == 0;
}

}  // namespace trisbf::detail
