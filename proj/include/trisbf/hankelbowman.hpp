#pragma once

#include <complex>

#include "trisbf/types.hpp"

namespace trisbf {

// Summation indices of the nested Hankel-Bowman sum (one summand).
struct HBIndexState {
    int zeta = 0, b = 0, c = 0, d = 0, g = 0, h = 0, m = 0, t = 0, u = 0, v = 0;
};

// Derived exponents. Half-integers are exact in double.
struct HBExponents {
    int L = 0, alpha = 0;
    double beta = 0, epsilon = 0, eta = 0, kappa = 0, lambda = 0, rho = 0, phi = 0;
    int Omega = 0, sigma = 0, tau = 0;
};

// Checks the index ranges and that every denominator (eps+1, eta+1, kappa+1,
// lambda+1, rho+1) is positive; throws domain otherwise.
HBExponents hb_exponents(const HBIndexState& s, const OrderTriple& ell, int n);

struct HBCoefficients {
    std::complex<double> omega;  // power-law part
    std::complex<double> psi;    // hypergeometric part
};

// omega = Gamma((alpha+1)/2) (-1)^(-beta) i^(zeta+1) / (eps+1) on the principal branch;
// psi = 2 (-i)^(alpha+1+2b-c) / ((alpha+1)(kappa+1)(lambda+1)(rho+1)).
HBCoefficients hb_coefficients(const HBIndexState& s, const OrderTriple& ell, int n);

struct ZYTerms {
    double Z = 0, Y = 0;
};

// Z and Y at signed radius sum rs. Gamma(s, u^2) is continued to negative
// u = rs/2p as Gamma(s) - sgn(u)^(2s) lower_gamma(s, u^2) and powers of u keep their sign.
ZYTerms z_y_terms(const HBIndexState& s, const OrderTriple& ell, int n, double rs, double p);

// Power-law and hypergeometric q-integrals for one zeta, normalised as
//   I_pl = Gamma((alpha+1)/2) int w(q) exp(-(s/2p)^2) s^zeta d^3q,
//   I_hg = (-i)^(alpha+1) 2/(alpha+1) (2p)^-(alpha+1) int w(q) s^(N+1) 1F1(1; (alpha+3)/2; -(s/2p)^2) d^3q,
// with w(q) = prod (1-q_i^2)^l_i, s = r.q, N = n + l1+l2+l3, alpha = N - zeta.
std::complex<double> i_pl(const WeightedIntegralSpec& spec, int zeta, const PrecisionPolicy& policy = {});
std::complex<double> i_hg(const WeightedIntegralSpec& spec, int zeta, const PrecisionPolicy& policy = {});

struct HBLimits {
    int max_order = 6;  // per l_i
    int max_power = 6;  // n
};

// Gaussian damping, any n >= 0.
EvalResult evaluate_hb(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy = {},
                       const HBLimits& limits = {});

// Summand-by-summand version built on hb_coefficients; slow, used to check
// the aggregated evaluation.
EvalResult evaluate_hb_direct(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy = {},
                              const HBLimits& limits = {});

}  // namespace trisbf
