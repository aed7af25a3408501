#pragma once

#include <complex>
#include <vector>

#include "trisbf/types.hpp"

namespace trisbf {

// |x| above which the chi-pattern 2F2 switches from its alternating power
// series to the positive Dawson-moment series.
inline constexpr double dawson_path_threshold = 4.0;

// Q_0(z) .. Q_ell_max(z), principal branch, cut on [-1, 1].
std::vector<std::complex<double>> legendre_q_sequence(int ell_max, std::complex<double> z,
                                                      const PrecisionPolicy& policy = {});

// Gamma(s, x) for s in {1/2, 1, 3/2, ...}, x >= 0.
double upper_incomplete_gamma(double s, double x, const PrecisionPolicy& policy = {});

// regularized 2F2(1, (m+2)/2; 3/2, (m+4)/2; x), x <= 0
double reg_2f2_chi_pattern(int m, double x, const PrecisionPolicy& policy = {});

struct PfqReport {
    std::complex<double> value;
    double cancellation = 1;  // max |partial sum| / |value|
    Tier tier = Tier::binary64;
    bool quality_ok = true;
};

// pFq for the entire cases (p <= q); re-run at higher precision when the
// cancellation ratio exceeds the policy threshold.
PfqReport pfq_report(const std::vector<double>& upper, const std::vector<double>& lower, std::complex<double> x,
                     const PrecisionPolicy& policy = {});

std::complex<double> pfq(const std::vector<double>& upper, const std::vector<double>& lower, std::complex<double> x,
                         const PrecisionPolicy& policy = {});

// pFq divided by the product of Gamma(lower)
std::complex<double> pfq_regularized(const std::vector<double>& upper, const std::vector<double>& lower,
                                     std::complex<double> x, const PrecisionPolicy& policy = {});

// exp(i pi q); integer and half-integer q give exact results.
std::complex<double> minus_one_power(double q);

}  // namespace trisbf
