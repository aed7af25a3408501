#include "support.hpp"
#include "trisbf/oracle.hpp"
#include "trisbf/paramdiff.hpp"

using namespace trisbf;
using testing::rel_diff;

namespace {

WeightedIntegralSpec make(OrderTriple ell, RadiiTriple r, DampingKind k, double p, int n) {
    WeightedIntegralSpec s;
    s.ell = ell;
    s.r = r;
    s.damping = {k, p};
    s.n = n;
    return s;
}

constexpr auto EXP = DampingKind::exponential;
constexpr auto GAUSS = DampingKind::gaussian;

}  // namespace

TEST_CASE("derivative order per damping") {
    CHECK(derivative_order(make({0, 0, 0}, {1, 1, 1}, EXP, 1, 2)) == 0);
    CHECK(derivative_order(make({0, 0, 0}, {1, 1, 1}, EXP, 1, 5)) == 3);
    CHECK(derivative_order(make({0, 0, 0}, {1, 1, 1}, GAUSS, 1, 6)) == 2);
    using testing::kind;
    using testing::thrown_kind;
    CHECK(thrown_kind([] { derivative_order(make({0, 0, 0}, {1, 1, 1}, EXP, 1, 1)); }) ==
          kind(ErrorKind::unsupported_power));
    CHECK(thrown_kind([] { derivative_order(make({0, 0, 0}, {1, 1, 1}, GAUSS, 1, 3)); }) ==
          kind(ErrorKind::unsupported_power));
    CHECK(thrown_kind([] { derivative_order(make({0, 0, 0}, {1, 1, 1}, GAUSS, 1, 0)); }) ==
          kind(ErrorKind::unsupported_power));
    CHECK(thrown_kind([] { derivative_order(make({0, 0, 0}, {1, 1, 1}, EXP, 1, 3 + max_derivative_order)); }) ==
          kind(ErrorKind::derivative_order_limit));
    CHECK(thrown_kind([] { derivative_order(make({0, 0, 0}, {1, 1, 1}, EXP, 1, 2 + max_derivative_order)); }) == -1);
}

TEST_CASE("weighted values against independent references") {
    struct Ref {
        OrderTriple ell;
        RadiiTriple r;
        DampingKind kind;
        double p;
        int n;
        double value;
    };
    const Ref refs[] = {
        {{0, 0, 0}, {1, 1, 1}, EXP, 1, 3, 0.3},
        {{1, 1, 0}, {1, 2, 1.5}, GAUSS, 1, 4, 0.0303972060937153},
        {{2, 1, 2}, {0.7, 2.5, 1.3}, EXP, 0.5, 4, 0.000140660364365741},
        {{2, 2, 1}, {0.7, 2.5, 1.3}, GAUSS, 0.5, 6, -0.324412183790492},
        {{2, 2, 2}, {2.5, 0.7, 0.7}, GAUSS, 2, 6, 3.31818546359043e-06},
        {{1, 0, 2}, {1, 2, 1.5}, EXP, 2, 8, -0.00162744014895248},
    };
    for (const auto& ref : refs) {
        EvalResult res = evaluate_weighted(make(ref.ell, ref.r, ref.kind, ref.p, ref.n));
        CAPTURE(ref.n);
        CHECK(rel_diff(res.value, ref.value) <= 1e-10);
        CHECK(res.diag.quality_ok);
    }
}

TEST_CASE("n = 2 is the plain recursion result") {
    auto spec = make({2, 1, 1}, {0.7, 2.5, 1.3}, GAUSS, 0.8, 2);
    CHECK(evaluate_weighted(spec).value == evaluate(spec).value);
    spec.damping.kind = EXP;
    CHECK(evaluate_weighted(spec).value == evaluate(spec).value);
}

TEST_CASE("jet derivatives agree with finite differences") {
    const WeightedIntegralSpec specs[] = {
        make({1, 1, 0}, {1, 2, 1.5}, EXP, 1, 3),
        make({2, 1, 2}, {0.7, 2.5, 1.3}, EXP, 0.5, 4),
        make({1, 1, 0}, {1, 2, 1.5}, GAUSS, 1, 4),
        make({2, 2, 1}, {0.7, 2.5, 1.3}, GAUSS, 0.5, 6),
    };
    for (const auto& s : specs) {
        double jet = evaluate_weighted(s).value;
        auto fd = finite_difference_weighted(s);
        CAPTURE(s.n);
        CHECK(fd.step > 0);
        CHECK(rel_diff(jet, fd.value) <= 1e-8);
    }
}

TEST_CASE("weighted values agree with quadrature") {
    const WeightedIntegralSpec specs[] = {
        make({1, 0, 0}, {1, 2, 1.5}, EXP, 1, 3),
        make({2, 1, 1}, {0.7, 1.3, 2.5}, GAUSS, 1, 4),
    };
    for (const auto& s : specs) {
        auto q = quadrature_eval(s, 1e-10);
        double v = evaluate_weighted(s).value;
        CHECK(std::fabs(v - q.value) <= 1e-9 * std::fabs(q.value) + q.error_estimate);
    }
}
