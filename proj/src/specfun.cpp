#include "trisbf/specfun.hpp"

#include <cmath>

#include "trisbf/detail/specfun_impl.hpp"
#include "trisbf/detail/tiers.hpp"

namespace trisbf {

using detail::run_tiers;

std::vector<std::complex<double>> legendre_q_sequence(int ell_max, std::complex<double> z,
                                                      const PrecisionPolicy& policy) {
    validate(policy);
    std::vector<std::complex<double>> out;
    run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        auto seq = detail::legendre_q_sequence_t<T>(ell_max, cplx<T>(T(z.real()), T(z.imag())), policy.max_terms);
        bool ok = true;
        for (int l = 0; l <= ell_max; ++l) {
            double err = detail::rounding_error<T>(seq.scale[l]);
            if (err > policy.tolerance * detail::mag(seq.q[l])) ok = false;
        }
        if (!ok && !last) return false;
        out.clear();
        for (auto& q : seq.q) out.emplace_back(to_double(q.re), to_double(q.im));
        return true;
    });
    return out;
}

double upper_incomplete_gamma(double s, double x, const PrecisionPolicy& policy) {
    double two_s = 2 * s;
    if (!(s > 0) || two_s != std::floor(two_s)) fail(ErrorKind::domain, "s must be a positive multiple of 1/2");
    if (!(x >= 0)) fail(ErrorKind::domain, "x must be non-negative");
    // Both regimes are cancellation free except the series branch, whose
    // subtraction Gamma(s) - lower is benign for x < s + 1; binary128 covers it.
    double out = 0;
    run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        T v = detail::upper_incomplete_gamma_direct<T>(static_cast<int>(two_s), T(x), policy.max_terms);
        T g = detail::half_gamma<T>(static_cast<int>(two_s));
        double err = detail::rounding_error<T>(4 * to_double(g));
        if (err > policy.tolerance * to_double(v) && !last) return false;
        out = to_double(v);
        return true;
    });
    return out;
}

double reg_2f2_chi_pattern(int m, double x, const PrecisionPolicy& policy) {
    if (m < 0) fail(ErrorKind::domain, "m must be non-negative");
    if (!(x <= 0)) fail(ErrorKind::domain, "chi-pattern 2F2 needs x <= 0");
    double out = 0;
    run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        T norm = detail::half_gamma<T>(3) * detail::half_gamma<T>(m + 4);
        if (x == 0) {
            out = to_double(1 / norm);
            return true;
        }
        using std::sqrt;
        T y = sqrt(T(-x));
        auto mom = detail::dawson_moments<T>(m, y, dawson_path_threshold, policy.max_terms);
        // reg 2F2 = (m+2) M_m(y) / (y^(m+2) Gamma(3/2) Gamma((m+4)/2))
        T f = T(m + 2) / (ipow(y, m + 2) * norm);
        T v = f * mom.m[m];
        double err = detail::rounding_error<T>(to_double(f) * mom.scale[m]);
        if (err > policy.tolerance * detail::mag(v) && !last) return false;
        out = to_double(v);
        return true;
    });
    return out;
}

PfqReport pfq_report(const std::vector<double>& upper, const std::vector<double>& lower, std::complex<double> x,
                     const PrecisionPolicy& policy) {
    validate(policy);
    if (upper.size() > lower.size()) fail(ErrorKind::domain, "only entire pFq (p <= q) are supported");
    PfqReport rep;
    rep.tier = run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        std::vector<T> a(upper.begin(), upper.end()), b(lower.begin(), lower.end());
        auto r = detail::pfq_series<T>(a, b, cplx<T>(T(x.real()), T(x.imag())), policy.max_terms);
        double v = to_double(abs(r.value));
        double canc = v > 0 ? r.max_partial / v : INFINITY;
        if (x == std::complex<double>(0, 0)) canc = 1;
        rep.value = {to_double(r.value.re), to_double(r.value.im)};
        rep.cancellation = canc;
        rep.quality_ok = canc <= policy.cancellation_threshold ||
                         detail::rounding_error<T>(r.abs_sum) <= policy.tolerance * v;
        if (canc > policy.cancellation_threshold && !last && !rep.quality_ok) return false;
        return true;
    });
    return rep;
}

std::complex<double> pfq(const std::vector<double>& upper, const std::vector<double>& lower, std::complex<double> x,
                         const PrecisionPolicy& policy) {
    return pfq_report(upper, lower, x, policy).value;
}

std::complex<double> pfq_regularized(const std::vector<double>& upper, const std::vector<double>& lower,
                                     std::complex<double> x, const PrecisionPolicy& policy) {
    std::complex<double> v = pfq(upper, lower, x, policy);
    double g = 1;
    for (double b : lower) g *= std::tgamma(b);
    return v / g;
}

std::complex<double> minus_one_power(double q) {
    double r = q - 2 * std::round(q / 2);  // r in [-1, 1]
    if (r == 0) return {1, 0};
    if (r == 1 || r == -1) return {-1, 0};
    if (r == 0.5) return {0, 1};
    if (r == -0.5) return {0, -1};
    const double pi = 3.14159265358979323846;
    return {std::cos(pi * r), std::sin(pi * r)};
}

}  // namespace trisbf
