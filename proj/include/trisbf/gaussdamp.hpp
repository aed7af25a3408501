#pragma once

#include <complex>

#include "trisbf/expdamp.hpp"
#include "trisbf/types.hpp"

namespace trisbf {

// 2^m p^(m+1) Gamma((m+1)/2, (rs/2p)^2), continued to negative rs
double g_factor(int m, double rs, double p, const PrecisionPolicy& policy = {});

// -(i/4p) Gamma((m+2)/2) rs^(m+2) reg2F2(1, (m+2)/2; 3/2, (m+4)/2; -(rs/2p)^2); purely imaginary
std::complex<double> chi_factor(int m, double rs, double p, const PrecisionPolicy& policy = {});

// Base case for weight k^2 exp(-(p k)^2); radii in slot order.
EvalResult gauss_base_case(int ell, BaseCaseVariant variant, const RadiiTriple& radii, double p,
                           const PrecisionPolicy& policy = {}, int max_ell = default_base_case_max);

}  // namespace trisbf
