#include <cmath>
#include <cstdio>
#include <string>

#include "trisbf/error.hpp"
#include "trisbf/scalar.hpp"
#include "trisbf/types.hpp"

namespace trisbf {

const char* tier_name(Tier t) {
    switch (t) {
        case Tier::binary64: return "binary64";
        case Tier::binary128: return "binary128";
        case Tier::mpfr50: return "mpfr50";
        case Tier::mpfr100: return "mpfr100";
    }
    return "?";
}

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::argument_on_cut: return "argument-on-cut";
        case ErrorKind::overflow: return "overflow";
        case ErrorKind::nonconvergence: return "non-convergence";
        case ErrorKind::pole: return "pole";
        case ErrorKind::order_limit: return "order-limit";
        case ErrorKind::reality_violation: return "reality-violation";
        case ErrorKind::unsupported_power: return "unsupported-power";
        case ErrorKind::derivative_order_limit: return "derivative-order-limit";
        case ErrorKind::cost_limit: return "cost-limit";
        case ErrorKind::tolerance_unreachable: return "tolerance-unreachable";
        case ErrorKind::io: return "io";
        case ErrorKind::usage: return "usage";
    }
    return "?";
}

const char* damping_name(DampingKind k) { return k == DampingKind::exponential ? "exp" : "gauss"; }

const char* variant_name(BaseCaseVariant v) {
    switch (v) {
        case BaseCaseVariant::L00: return "L00";
        case BaseCaseVariant::Lm10: return "Lm10";
        case BaseCaseVariant::Lm1m1: return "Lm1m1";
    }
    return "?";
}

std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void validate(const PrecisionPolicy& policy) {
    if (!(policy.tolerance > 0)) fail(ErrorKind::domain, "tolerance must be positive");
    if (!(policy.cancellation_threshold > 1)) fail(ErrorKind::domain, "cancellation threshold must exceed 1");
    if (policy.max_terms < 1) fail(ErrorKind::domain, "max terms must be at least 1");
    if (policy.lowest_tier > policy.highest_tier) fail(ErrorKind::domain, "empty precision tier range");
}

void validate(const WeightedIntegralSpec& spec) {
    for (int l : spec.ell)
        if (l < 0) fail(ErrorKind::domain, "orders must be non-negative");
    for (double r : spec.r)
        if (!(r > 0) || !std::isfinite(r)) fail(ErrorKind::domain, "radii must be positive and finite");
    if (!(spec.damping.p != 0) || !std::isfinite(spec.damping.p))
        fail(ErrorKind::domain, "damping parameter p must be finite and p != 0");
    if (spec.n < 0) fail(ErrorKind::domain, "power n must be non-negative");
}

}  // namespace trisbf
