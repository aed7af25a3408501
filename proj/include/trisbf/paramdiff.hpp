#pragma once

#include "trisbf/jet.hpp"
#include "trisbf/recursion.hpp"
#include "trisbf/types.hpp"

namespace trisbf {

inline constexpr int max_derivative_order = max_jet_order;

// Number of d/d(-p^2) steps taking weight k^2 to k^n: n-2 (exp), (n-2)/2 (gauss).
// Throws unsupported_power / derivative_order_limit.
int derivative_order(const WeightedIntegralSpec& spec);

// k^n-weighted integral by differentiating the recursion result in -p^2.
// n = 2 is exactly recursion evaluate().
EvalResult evaluate_weighted(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy = {},
                             int max_order = default_max_order);

struct FiniteDifferenceReport {
    double value = 0;
    double step = 0;              // h in p^2
    double richardson_change = 0;  // |extrapolated - finer estimate|
};

// Same derivative from central differences in p^2 (Richardson-extrapolated),
// run in 100-digit arithmetic so the differencing loses nothing visible.
FiniteDifferenceReport finite_difference_weighted(const WeightedIntegralSpec& spec,
                                                  int max_order = default_max_order);

}  // namespace trisbf
