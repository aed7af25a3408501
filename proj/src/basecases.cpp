#include <cmath>
#include <string>

#include "trisbf/detail/kernels.hpp"
#include "trisbf/detail/tiers.hpp"
#include "trisbf/expdamp.hpp"
#include "trisbf/gaussdamp.hpp"

namespace trisbf {

namespace {

void check_base_case_inputs(int ell, const RadiiTriple& radii, double p, int max_ell) {
    if (ell < 0) fail(ErrorKind::domain, "base-case order must be non-negative");
    if (ell > max_ell) fail(ErrorKind::order_limit, "base-case order " + std::to_string(ell) + " exceeds maximum " +
                                                        std::to_string(max_ell));
    for (double r : radii)
        if (!(r > 0) || !std::isfinite(r)) fail(ErrorKind::domain, "radii must be positive and finite");
    if (!(p != 0) || !std::isfinite(p)) fail(ErrorKind::domain, "damping parameter p must be finite and p != 0");
}

template <class Leaf>
EvalResult run_base_case(const char* method, const PrecisionPolicy& policy, Leaf&& leaf) {
    EvalResult res;
    res.method = method;
    res.diag.base_cases = 1;
    res.diag.tier = detail::run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        auto [lv, calls] = leaf(std::type_identity<T>{});
        double v = to_double(lv.re);
        double err = detail::rounding_error<T>(lv.scale);
        bool ok = detail::accurate_enough(v, err, policy.tolerance);
        if (!ok && !last) {
            ++res.diag.escalations;
            return false;
        }
        res.value = v;
        res.im_residual = to_double(lv.im);
        res.error_estimate = err;
        res.diag.kernel_calls += calls;
        res.diag.quality_ok = ok;
        return true;
    });
    if (!reality_bound_ok(res.value, res.im_residual))
        fail(ErrorKind::reality_violation, std::string(method) + ": imaginary residual " + format17(res.im_residual) +
                                               " exceeds bound for value " + format17(res.value));
    return res;
}

}  // namespace

bool reality_bound_ok(double value, double im_residual) {
    return std::fabs(im_residual) <= std::max(1e-12, 1e-10 * std::fabs(value));
}

RArguments r_arguments(const RadiiTriple& radii, double p) {
    double P = p * p;
    auto R = [&](int s2, int s3) {
        return std::complex<double>((s2 * radii[1] + s3 * radii[2]) / radii[0], -P / radii[0]);
    };
    return {R(-1, -1), R(-1, 1), R(1, -1), R(1, 1)};
}

EvalResult exp_base_case(int ell, BaseCaseVariant variant, const RadiiTriple& radii, double p,
                         const PrecisionPolicy& policy, int max_ell) {
    check_base_case_inputs(ell, radii, p, max_ell);
    validate(policy);
    EvalResult res = run_base_case("exp-base-case", policy, [&]<class T>(std::type_identity<T>) {
        detail::ExpKernelStore<T> ks(p, ell, policy.max_terms);
        auto lv = detail::exp_leaf<T>(ell, variant, radii, ks);
        return std::make_pair(lv, ks.calls);
    });
    if (p * p / radii[0] < 1e-4) {
        res.diag.low_confidence = true;
        res.diag.notes.push_back("p^2/r1 < 1e-4: Legendre arguments close to the branch cut");
    }
    return res;
}

EvalResult gauss_base_case(int ell, BaseCaseVariant variant, const RadiiTriple& radii, double p,
                           const PrecisionPolicy& policy, int max_ell) {
    check_base_case_inputs(ell, radii, p, max_ell);
    validate(policy);
    double ap = std::fabs(p);
    return run_base_case("gauss-base-case", policy, [&]<class T>(std::type_identity<T>) {
        detail::GaussKernelStore<T> ks(ap, ell, policy.max_terms);
        auto lv = detail::gauss_leaf<T>(ell, variant, radii, ks);
        return std::make_pair(lv, ks.calls);
    });
}

double g_factor(int m, double rs, double p, const PrecisionPolicy& policy) {
    if (m < 0) fail(ErrorKind::domain, "m must be non-negative");
    if (!(p != 0)) fail(ErrorKind::domain, "damping parameter p must be non-zero");
    double ap = std::fabs(p), out = 0;
    detail::run_tiers(policy, [&]<class T>(std::type_identity<T>, bool) {
        detail::GaussKernelStore<T> ks(ap, m, policy.max_terms);
        out = to_double(ks.get(quad(rs)).g[m]);
        return true;  // positive-term evaluation; accurate in any tier
    });
    return out;
}

std::complex<double> chi_factor(int m, double rs, double p, const PrecisionPolicy& policy) {
    if (m < 0) fail(ErrorKind::domain, "m must be non-negative");
    if (!(p != 0)) fail(ErrorKind::domain, "damping parameter p must be non-zero");
    double ap = std::fabs(p), out = 0;
    detail::run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        detail::GaussKernelStore<T> ks(ap, m, policy.max_terms);
        const auto& e = ks.get(quad(rs));
        double v = to_double(e.chi[m]);
        double err = detail::rounding_error<T>(e.chi_scale[m]);
        if (!detail::accurate_enough(v, err, policy.tolerance) && !last) return false;
        out = v;
        return true;
    });
    return {0.0, -out};
}

}  // namespace trisbf
