#pragma once

#include <complex>

#include "trisbf/types.hpp"

namespace trisbf {

// j_l(x) in long double, l >= -1 (j_{-1}(x) = cos(x)/x), x >= 0.
long double sph_bessel_j(int l, long double x);

// sqrt(j_l^2 + y_l^2); non-increasing in x, bounds |j_l(x)|.
long double sph_bessel_modulus(int l, long double x);

struct QuadratureReport {
    double value = 0;
    double error_estimate = 0;  // interval errors plus tail bound
    int intervals_used = 0;
    double truncation_point = 0;  // k_max
    double tail_bound = 0;
};

// Brute-force int_0^inf k^n w(k) j_l1(k r1) j_l2(k r2) j_l3(k r3) dk by globally
// adaptive Gauss-Kronrod over panels of width pi / max r. tol is relative,
// in [1e-12, 1e-4]. Throws tolerance_unreachable when the long double
// round-off floor or the interval budget stops short.
QuadratureReport quadrature_eval(const WeightedIntegralSpec& spec, double tol);

// Same, with orders >= -1 allowed (base-case integrands); the integrand must
// stay integrable at k = 0.
QuadratureReport quadrature_eval_orders(const std::array<int, 3>& ell, const RadiiTriple& r, const Damping& damping,
                                        int n, double tol);

enum class QIntegral { power_law, hypergeometric };

// Tensor-product Gauss-Legendre cubature of the q-integrals behind i_pl / i_hg
// (same normalisation as those functions). Gaussian damping, l_i <= 2,
// tol >= 1e-9, 0 <= zeta <= n + l1 + l2 + l3.
std::complex<double> cubature_q(const WeightedIntegralSpec& spec, QIntegral which, int zeta, double tol);

}  // namespace trisbf
