#include "support.hpp"
#include "trisbf/hankelbowman.hpp"
#include "trisbf/oracle.hpp"
#include "trisbf/recursion.hpp"

using namespace trisbf;
using testing::rel_diff;

namespace {

WeightedIntegralSpec gauss(OrderTriple ell, RadiiTriple r, double p, int n) {
    WeightedIntegralSpec s;
    s.ell = ell;
    s.r = r;
    s.damping = {DampingKind::gaussian, p};
    s.n = n;
    return s;
}

// Every in-range index state for the given orders and power.
template <class F> void for_each_state(const OrderTriple& ell, int n, F&& fn) {
    const int L = ell[0] + ell[1] + ell[2];
    HBIndexState s;
    for (s.zeta = 0; s.zeta <= n + L; ++s.zeta)
        for (s.b = 0; s.b <= ell[2]; ++s.b)
            for (s.c = 0; s.c <= 2 * s.b; ++s.c)
                for (s.d = 0; s.d <= ell[1]; ++s.d)
                    for (s.g = 0; s.g <= 2 * s.d; ++s.g)
                        for (s.h = 0; s.h <= s.c; ++s.h)
                            for (s.m = 0; s.m <= ell[0]; ++s.m)
                                for (s.t = 0; s.t <= 2 * s.m; ++s.t)
                                    for (s.u = 0; s.u <= s.g; ++s.u)
                                        for (s.v = 0; s.v <= s.g - s.u; ++s.v) fn(s);
}

}  // namespace

TEST_CASE("hankel-bowman values against independent references") {
    struct Ref {
        OrderTriple ell;
        RadiiTriple r;
        double p;
        int n;
        double value;
    };
    const Ref refs[] = {
        {{0, 0, 0}, {1, 1, 1}, 1, 0, 0.719248168367542},
        {{0, 0, 0}, {1, 1, 1}, 1, 1, 0.327930838103702},
        {{0, 0, 0}, {1, 1, 1}, 1, 2, 0.233810868279178},
        {{0, 0, 0}, {1, 2, 1.5}, 0.8, 3, 0.109568775090674},
        {{1, 0, 0}, {2, 1, 1}, 0.8, 2, 0.154495359891214},
        {{1, 1, 0}, {1, 2, 1.5}, 1, 3, 0.0269402213204387},
        {{0, 1, 0}, {1, 2, 1}, 1.2, 1, 0.0893820163284136},
        {{2, 1, 1}, {0.7, 1.3, 2.5}, 0.5, 2, -0.00371942883732442},
        {{4, 4, 4}, {0.7, 0.7, 0.7}, 0.5, 2, 7.84775656708901e-05},
        {{4, 4, 4}, {2.5, 2.5, 2.5}, 0.5, 2, 0.00993291870345112},
        {{4, 4, 4}, {0.7, 2.5, 1.3}, 0.5, 2, -4.67476265531238e-05},
        {{2, 2, 2}, {0.7, 2.5, 1.3}, 2, 2, 8.97133289418791e-06},
    };
    for (const auto& ref : refs) {
        EvalResult res = evaluate_hb(gauss(ref.ell, ref.r, ref.p, ref.n));
        CAPTURE(ref.ell[0]);
        CAPTURE(ref.ell[1]);
        CAPTURE(ref.ell[2]);
        CAPTURE(ref.n);
        CHECK(rel_diff(res.value, ref.value) <= 1e-10);
        CHECK(res.diag.quality_ok);
        CHECK(res.method == "hankel-bowman");
    }
}

TEST_CASE("hankel-bowman matches the recursion route for n = 2") {
    for (OrderTriple ell : {OrderTriple{1, 1, 1}, OrderTriple{3, 2, 0}, OrderTriple{4, 4, 3}})
        for (double p : {0.5, 1.0, 2.0}) {
            auto s = gauss(ell, {1.3, 0.7, 2.5}, p, 2);
            CHECK(rel_diff(evaluate_hb(s).value, evaluate(s).value) <= 1e-9);
        }
}

TEST_CASE("hankel-bowman odd and zero powers agree with quadrature") {
    for (int n : {0, 1, 3})
        for (OrderTriple ell : {OrderTriple{0, 0, 0}, OrderTriple{2, 1, 0}, OrderTriple{2, 2, 2}}) {
            auto s = gauss(ell, {0.7, 1.3, 2.5}, 1, n);
            auto q = quadrature_eval(s, 1e-10);
            double v = evaluate_hb(s).value;
            CAPTURE(n);
            CHECK(std::fabs(v - q.value) <= 1e-8 * std::fabs(q.value) + q.error_estimate);
        }
}

TEST_CASE("aggregated and summand-by-summand sums agree") {
    for (int n : {0, 1, 2, 3}) {
        auto s = gauss({1, 1, 1}, {0.7, 1.3, 2.5}, 0.9, n);
        double a = evaluate_hb(s).value;
        double b = evaluate_hb_direct(s).value;
        CAPTURE(n);
        CHECK(rel_diff(a, b) <= 1e-10);
    }
}

TEST_CASE("q-integrals agree with direct cubature") {
    struct Case {
        OrderTriple ell;
        RadiiTriple r;
        double p;
        int n;
    };
    const Case cases[] = {
        {{0, 0, 0}, {1, 1, 1}, 1, 2},
        {{0, 1, 0}, {1, 2, 1}, 1.2, 2},
        {{2, 2, 1}, {0.7, 1.3, 2.5}, 0.5, 2},
        {{1, 0, 2}, {1.5, 0.8, 2}, 0.9, 1},
    };
    for (const auto& c : cases) {
        auto s = gauss(c.ell, c.r, c.p, c.n);
        const int N = c.n + c.ell[0] + c.ell[1] + c.ell[2];
        for (int zeta = 0; zeta <= N; ++zeta) {
            std::complex<double> pl = i_pl(s, zeta), hg = i_hg(s, zeta);
            std::complex<double> cpl = cubature_q(s, QIntegral::power_law, zeta, 1e-9);
            std::complex<double> chg = cubature_q(s, QIntegral::hypergeometric, zeta, 1e-9);
            // several of these vanish by symmetry, so the floor is set by the integrand size
            double scale_pl = std::max({std::abs(pl), std::abs(cpl), 1.0});
            double scale_hg = std::max({std::abs(hg), std::abs(chg), 1.0});
            CAPTURE(zeta);
            CHECK(std::abs(pl - cpl) <= 1e-8 * scale_pl);
            CHECK(std::abs(hg - chg) <= 1e-7 * scale_hg);
        }
    }
}

TEST_CASE("every in-range index state has positive denominators") {
    int states = 0;
    for (OrderTriple ell : {OrderTriple{0, 0, 0}, OrderTriple{1, 0, 2}, OrderTriple{2, 2, 2}, OrderTriple{3, 1, 2}})
        for (int n = 0; n <= 4; ++n) {
            int bad = 0;
            for_each_state(ell, n, [&](const HBIndexState& s) {
                HBExponents e = hb_exponents(s, ell, n);
                bool ok = e.epsilon + 1 > 0 && e.eta + 1 > 0 && e.kappa + 1 > 0 && e.lambda + 1 > 0 &&
                          e.rho + 1 > 0 && e.alpha >= 0;
                if (!ok) ++bad;
                ++states;
            });
            CAPTURE(n);
            CHECK(bad == 0);
        }
    CHECK(states > 1000);
}

TEST_CASE("index states outside their ranges are rejected") {
    using testing::kind;
    using testing::thrown_kind;
    HBIndexState s;
    s.b = 1;  // needs l3 >= 1
    CHECK(thrown_kind([&] { hb_exponents(s, {0, 0, 0}, 2); }) == kind(ErrorKind::domain));
    HBIndexState z;
    z.zeta = 5;
    CHECK(thrown_kind([&] { hb_exponents(z, {1, 1, 0}, 2); }) == kind(ErrorKind::domain));
    CHECK(thrown_kind([&] { hb_exponents(z, {1, 1, 1}, 2); }) == -1);
}

TEST_CASE("hankel-bowman limits") {
    using testing::kind;
    using testing::thrown_kind;
    auto e = gauss({1, 1, 0}, {1, 2, 1.5}, 1, 2);
    e.damping.kind = DampingKind::exponential;
    CHECK(thrown_kind([&] { evaluate_hb(e); }) == kind(ErrorKind::domain));
    CHECK(thrown_kind([] { evaluate_hb(gauss({7, 0, 0}, {1, 1, 1}, 1, 2)); }) == kind(ErrorKind::cost_limit));
    CHECK(thrown_kind([] { evaluate_hb(gauss({1, 0, 0}, {1, 1, 1}, 1, 7)); }) == kind(ErrorKind::cost_limit));
    HBLimits wide;
    wide.max_order = 7;
    CHECK(thrown_kind([&] { evaluate_hb(gauss({7, 0, 0}, {1, 1, 1}, 1, 2), {}, wide); }) == -1);
    CHECK(thrown_kind([] { cubature_q(gauss({3, 0, 0}, {1, 1, 1}, 1, 2), QIntegral::power_law, 0, 1e-8); }) ==
          kind(ErrorKind::cost_limit));
}
