#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trisbf/scalar.hpp"

namespace trisbf {

using OrderTriple = std::array<int, 3>;
using RadiiTriple = std::array<double, 3>;

enum class DampingKind { exponential, gaussian };

// exponential: weight exp(-p^2 k); gaussian: weight exp(-(p k)^2)
struct Damping {
    DampingKind kind = DampingKind::exponential;
    double p = 1.0;
};

const char* damping_name(DampingKind k);

// (l, 0, 0), (l, -1, 0), (l, -1, -1)
enum class BaseCaseVariant { L00, Lm10, Lm1m1 };

const char* variant_name(BaseCaseVariant v);

struct WeightedIntegralSpec {
    OrderTriple ell{0, 0, 0};
    RadiiTriple r{1.0, 1.0, 1.0};
    Damping damping;
    int n = 2;  // power of k in the weight
};

struct PrecisionPolicy {
    double tolerance = 1e-12;
    double cancellation_threshold = 1e8;
    int max_terms = 10000;
    Tier lowest_tier = Tier::binary64;
    Tier highest_tier = Tier::mpfr100;
};

void validate(const PrecisionPolicy& policy);

struct Diagnostics {
    int base_cases = 0;
    int escalations = 0;
    Tier tier = Tier::binary64;
    std::int64_t kernel_calls = 0;
    double amplification = 0;  // sum over leaves of |d value / d leaf|
    bool low_confidence = false;
    bool conditioning_warning = false;
    bool quality_ok = true;
    std::vector<std::string> notes;
};

struct EvalResult {
    double value = 0;
    std::string method;
    double im_residual = 0;
    double error_estimate = 0;
    Diagnostics diag;
};

// Throws domain errors for non-positive radii, non-positive or non-finite p,
// negative orders.
void validate(const WeightedIntegralSpec& spec);

}  // namespace trisbf
