#pragma once

#include <complex>

#include "trisbf/types.hpp"

namespace trisbf {

inline constexpr int default_base_case_max = 22;

// Legendre arguments (-i p^2 + s2 r2 + s3 r3) / r1
struct RArguments {
    std::complex<double> mm, mp, pm, pp;
};

RArguments r_arguments(const RadiiTriple& radii, double p);

// Base case for weight k^2 exp(-p^2 k); radii in slot order (r1 carries ell).
EvalResult exp_base_case(int ell, BaseCaseVariant variant, const RadiiTriple& radii, double p,
                         const PrecisionPolicy& policy = {}, int max_ell = default_base_case_max);

// |Im| <= max(1e-12, 1e-10 |value|)
bool reality_bound_ok(double value, double im_residual);

}  // namespace trisbf
