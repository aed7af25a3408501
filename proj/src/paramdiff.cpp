#include "trisbf/paramdiff.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "trisbf/detail/kernels.hpp"
#include "trisbf/detail/recursion_impl.hpp"
#include "trisbf/detail/tiers.hpp"
#include "trisbf/expdamp.hpp"

namespace trisbf {

namespace {

using Scales = std::array<double, max_jet_order + 1>;

// Everything below is a function of the shift t in p^2 = p0^2 - t, carried
// as a truncated Taylor series of order d in t.

template <class T> struct JetValue {
    Jet<T> re, im;
    Scales scale{};
};

template <class T> struct ExpJetStore {
    struct Entry {
        std::vector<std::array<cplx<T>, max_jet_order + 1>> coef;  // per l
        std::vector<Scales> scale;
    };
    T P;
    int lmax, order, max_terms;
    std::int64_t calls = 0;
    std::map<detail::ExpKey, Entry, detail::ExpKeyLess> table;

    ExpJetStore(double p, int lmax_, int order_, int max_terms_)
        : P(T(p) * T(p)), lmax(lmax_), order(order_), max_terms(max_terms_) {}

    const Entry& get(const detail::ExpKey& key) {
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        T ra = from_quad<T>(key.first), s = from_quad<T>(key.second);
        cplx<T> z0(s / ra, -P / ra);
        auto seq = detail::legendre_q_sequence_t<T>(lmax, z0, max_terms);
        calls += lmax + 1;
        Entry e;
        e.coef.resize(lmax + 1);
        e.scale.resize(lmax + 1);
        // z = z0 + i t / ra
        const cplx<T> dz(T(0), 1 / ra);
        const double adz = detail::mag(dz), az = detail::mag(z0);
        const double omz2 = detail::mag(cplx<T>(T(1)) - z0 * z0);
        for (int l = 0; l <= lmax; ++l) {
            auto a = detail::legendre_q_taylor<T>(l, z0, seq.q[l], l ? seq.q[l - 1] : seq.q[0], order);
            // error scales pushed through the same recurrence in magnitudes
            std::array<double, max_jet_order + 1> sa{};
            sa[0] = seq.scale[l];
            if (order >= 1)
                sa[1] = (l == 0 ? 0.0 : l * (az * seq.scale[l] + seq.scale[l - 1]) / omz2) + detail::mag(a[1]);
            for (int k = 0; k + 2 <= order; ++k)
                sa[k + 2] = (az * 2 * (k + 1) * (k + 1) * sa[k + 1] + std::abs(k * (k + 1) - l * (l + 1)) * sa[k]) /
                                (omz2 * (k + 2) * (k + 1)) +
                            detail::mag(a[k + 2]);
            cplx<T> f(T(1));
            double fm = 1;
            for (int k = 0; k <= order; ++k) {
                e.coef[l][k] = a[k] * f;
                e.scale[l][k] = sa[k] * fm;
                f *= dz;
                fm *= adz;
            }
        }
        return table.emplace(key, std::move(e)).first->second;
    }
};

template <class T>
JetValue<T> exp_jet_leaf(int ell, BaseCaseVariant var, const detail::LeafRadii& r, ExpJetStore<T>& ks) {
    auto keys = detail::exp_leaf_keys(r);
    const auto* q0 = &ks.get(keys[0]);
    const auto* q1 = &ks.get(keys[1]);
    const auto* q2 = &ks.get(keys[2]);
    const auto* q3 = &ks.get(keys[3]);
    int s1, s2, s3;
    cplx<T> phase;
    T sign;
    switch (var) {
        case BaseCaseVariant::L00: s1 = -1, s2 = -1, s3 = 1, phase = minus_i_pow<T>(ell + 1), sign = -1; break;
        case BaseCaseVariant::Lm10: s1 = -1, s2 = 1, s3 = -1, phase = minus_i_pow<T>(ell), sign = -1; break;
        default: s1 = 1, s2 = 1, s3 = 1, phase = minus_i_pow<T>(ell + 1), sign = 1; break;
    }
    T f = sign / (4 * T(r[0]) * T(r[1]) * T(r[2]));
    JetValue<T> out;
    out.re = Jet<T>(T(0), ks.order);
    out.im = Jet<T>(T(0), ks.order);
    for (int k = 0; k <= ks.order; ++k) {
        cplx<T> c = q0->coef[ell][k] + q1->coef[ell][k] * T(s1) + q2->coef[ell][k] * T(s2) + q3->coef[ell][k] * T(s3);
        cplx<T> v = phase * c * f;
        out.re.c[k] = v.re;
        out.im.c[k] = v.im;
        out.scale[k] = detail::mag(f) * (q0->scale[ell][k] + q1->scale[ell][k] + q2->scale[ell][k] + q3->scale[ell][k]) +
                       detail::mag(v);
    }
    return out;
}

template <class T> struct GaussJetStore {
    struct Entry {
        std::vector<Jet<T>> g, chi;  // chi(m, r) = -i chi[m]
        std::vector<Scales> g_scale, chi_scale;
    };
    T p0;
    int mmax, order, max_terms;
    Jet<T> p, pinv;
    std::int64_t calls = 0;
    std::map<quad, Entry, detail::QuadKeyLess> table;

    GaussJetStore(double p_, int mmax_, int order_, int max_terms_)
        : p0(T(p_)), mmax(mmax_), order(order_), max_terms(max_terms_) {
        Jet<T> P = -Jet<T>::variable(T(0), order) + p0 * p0;
        p = sqrt(P);
        pinv = T(1) / p;
    }

    const Entry& get(const quad& key) {
        using std::exp;
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        T r = from_quad<T>(key);
        Jet<T> u = pinv * (r / 2);
        Jet<T> du = derivative(u);
        T u0 = u.c[0];
        std::vector<T> up = detail::upper_gamma_table<T>(mmax + 1, u0 * u0);
        auto mom = detail::dawson_moments<T>(mmax, u0, dawson_path_threshold, max_terms);
        Jet<T> e2 = exp(-(u * u));
        // D' = 1 - 2 u D in u; one sweep per order
        T d0 = detail::dawson<T>(u0, max_terms);
        Jet<T> dj(d0, order);
        for (int it2 = 0; it2 < order; ++it2) dj = integrate(d0, (T(1) - T(2) * u * dj) * du, order);

        Entry e;
        e.g.resize(mmax + 1);
        e.chi.resize(mmax + 1);
        e.g_scale.resize(mmax + 1);
        e.chi_scale.resize(mmax + 1);
        Jet<T> twop = T(2) * p;
        Jet<T> pw = p;                                  // 2^m p^(m+1)
        Jet<T> cw = twop * (T(2) / root_pi<T>());       // (2/sqrt(pi)) (2p)^(m+1)
        Jet<T> um(T(1), order);                         // u^m
        for (int m = 0; m <= mmax; ++m) {
            T gc0 = detail::gamma_c<T>(m + 1, u0, up);
            Jet<T> gc = integrate(gc0, T(-2) * um * e2 * du, order);
            Jet<T> mj = integrate(mom.m[m], um * dj * du, order);
            e.g[m] = pw * gc;
            e.chi[m] = cw * mj;
            for (int k = 0; k <= order; ++k) {
                e.g_scale[m][k] = 8 * (k + 1) * detail::mag(e.g[m].c[k]);
                e.chi_scale[m][k] = detail::mag(cw.c[k]) * mom.scale[m] + 8 * (k + 1) * detail::mag(e.chi[m].c[k]);
            }
            pw = pw * twop;
            cw = cw * twop;
            um = um * u;
        }
        calls += 2 * (mmax + 1);
        return table.emplace(key, std::move(e)).first->second;
    }
};

template <class T>
JetValue<T> gauss_jet_leaf(int ell, BaseCaseVariant var, const detail::LeafRadii& r, GaussJetStore<T>& ks) {
    auto keys = detail::gauss_leaf_keys(r);
    const T ra(r[0]), rb(r[1]), rc(r[2]);
    const int d = ks.order;
    static constexpr int line_s2[4] = {1, 1, -1, -1};
    static constexpr int line_s3[4] = {1, -1, 1, -1};
    int sgn[4];
    switch (var) {
        case BaseCaseVariant::L00: sgn[0] = 1, sgn[1] = -1, sgn[2] = -1, sgn[3] = 1; break;
        case BaseCaseVariant::Lm10: sgn[0] = 1, sgn[1] = -1, sgn[2] = 1, sgn[3] = -1; break;
        default: sgn[0] = sgn[1] = sgn[2] = sgn[3] = 1; break;
    }
    std::array<std::vector<Jet<T>>, 4> dg, dc;
    std::array<std::vector<Scales>, 4> dsc;
    std::array<std::vector<T>, 4> base_pow;
    for (int k = 0; k < 4; ++k) {
        const auto& ep = ks.get(keys[2 * k]);
        const auto& em = ks.get(keys[2 * k + 1]);
        dg[k].resize(ell + 1);
        dc[k].resize(ell + 1);
        dsc[k].resize(ell + 1);
        base_pow[k].resize(ell + 1);
        for (int m = 0; m <= ell; ++m) {
            dg[k][m] = em.g[m] - ep.g[m];
            dc[k][m] = em.chi[m] - ep.chi[m];
            for (int j = 0; j <= d; ++j)
                dsc[k][m][j] = em.g_scale[m][j] + ep.g_scale[m][j] + em.chi_scale[m][j] + ep.chi_scale[m][j];
        }
        T base = -line_s2[k] * rb - line_s3[k] * rc;
        T pw(1);
        for (int e = 0; e <= ell; ++e) {
            base_pow[k][e] = pw;
            pw *= base;
        }
    }
    Jet<T> sg(T(0), d), sc(T(0), d);
    Scales ssum{};
    T rinv = 1 / ra;
    for (int n = 0; 2 * n <= ell; ++n) {
        T cn = detail::binom<T>(ell, n) * detail::binom<T>(2 * ell - 2 * n, ell) * ipow(rinv, 1 + ell - 2 * n);
        if (n % 2) cn = -cn;
        for (int m = 0; m <= ell - 2 * n; ++m) {
            T cm = cn * detail::binom<T>(ell - 2 * n, m);
            int e = ell - 2 * n - m;
            for (int k = 0; k < 4; ++k) {
                T w = cm * base_pow[k][e];
                if (sgn[k] < 0) w = -w;
                sg += dg[k][m] * w;
                sc += dc[k][m] * w;
                for (int j = 0; j <= d; ++j) ssum[j] += detail::mag(w) * dsc[k][m][j];
            }
        }
    }
    cplx<T> pv = minus_i_pow<T>(var == BaseCaseVariant::Lm10 ? ell + 1 : ell);
    if (var == BaseCaseVariant::L00) pv = -pv;
    Jet<T> pref = ks.pinv * (root_pi<T>() / (16 * rb * rc * ipow(T(2), ell)));
    Jet<T> x = sg * pref, y = -(sc * pref);  // value = pv (x + i y)
    JetValue<T> out;
    out.re = x * pv.re - y * pv.im;
    out.im = y * pv.re + x * pv.im;
    for (int j = 0; j <= d; ++j) {
        double s = 0;
        for (int i = 0; i <= j; ++i) s += detail::mag(pref.c[i]) * ssum[j - i];
        out.scale[j] = s + std::max(detail::mag(out.re.c[j]), detail::mag(out.im.c[j]));
    }
    return out;
}

template <class T, class LeafFn>
std::vector<JetValue<T>> run_jet_plan(const ReductionPlan& plan, const RadiiTriple& r, int order, LeafFn&& leaf) {
    std::vector<JetValue<T>> v(plan.nodes.size());
    for (size_t i = 0; i < plan.nodes.size(); ++i) {
        const PlanNode& node = plan.nodes[i];
        if (node.leaf) {
            detail::LeafRadii lr{r[node.leaf_slots[0]], r[node.leaf_slots[1]], r[node.leaf_slots[2]]};
            v[i] = leaf(node.leaf_ell, node.variant, lr);
            continue;
        }
        const auto &a = v[node.src[0]], &b = v[node.src[1]], &c = v[node.src[2]];
        T coef = T(r[node.slots[0]]) / T(r[node.slots[1]]) * T(node.num) / T(node.den);
        v[i].re = (a.re + b.re) * coef - c.re;
        v[i].im = (a.im + b.im) * coef - c.im;
        for (int k = 0; k <= order; ++k)
            v[i].scale[k] = detail::mag(coef) * (a.scale[k] + b.scale[k]) + c.scale[k] + detail::mag(v[i].re.c[k]);
    }
    return v;
}

// plain recursion value at an exact p^2 (as T), for the difference path
template <class T>
T plan_value_at(const ReductionPlan& plan, const RadiiTriple& r, DampingKind kind, const T& P, int max_terms) {
    using std::sqrt;
    if (kind == DampingKind::exponential) {
        detail::ExpKernelStore<T> ks(1.0, plan.max_leaf_ell, max_terms);
        ks.P = P;
        auto pv = detail::run_plan<T>(plan, r, [&](int l, BaseCaseVariant v, const detail::LeafRadii& lr) {
            return detail::exp_leaf<T>(l, v, lr, ks);
        });
        return pv.re.back();
    }
    detail::GaussKernelStore<T> ks(1.0, plan.max_leaf_ell, max_terms);
    ks.p = sqrt(P);
    auto pv = detail::run_plan<T>(plan, r, [&](int l, BaseCaseVariant v, const detail::LeafRadii& lr) {
        return detail::gauss_leaf<T>(l, v, lr, ks);
    });
    return pv.re.back();
}

}  // namespace

int derivative_order(const WeightedIntegralSpec& spec) {
    int d;
    if (spec.damping.kind == DampingKind::exponential) {
        if (spec.n < 2) fail(ErrorKind::unsupported_power, "exponential damping needs n >= 2");
        d = spec.n - 2;
    } else {
        if (spec.n < 2 || spec.n % 2)
            fail(ErrorKind::unsupported_power,
                 "gaussian recursion route needs even n >= 2; use the hankel-bowman method for n = " +
                     std::to_string(spec.n));
        d = (spec.n - 2) / 2;
    }
    if (d > max_derivative_order)
        fail(ErrorKind::derivative_order_limit, "derivative order " + std::to_string(d) + " exceeds " +
                                                    std::to_string(max_derivative_order) +
                                                    "; use the quadrature method instead");
    return d;
}

EvalResult evaluate_weighted(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy, int max_order) {
    validate(spec);
    validate(policy);
    const int d = derivative_order(spec);
    if (d == 0) return evaluate(spec, policy, nullptr, max_order);

    Canonical canon = canonicalize(spec.ell, spec.r);
    ReductionPlan plan = reduction_plan(canon.ell, max_order);
    const double p = std::fabs(spec.damping.p);
    const bool is_exp = spec.damping.kind == DampingKind::exponential;
    double dfact = 1;
    for (int i = 2; i <= d; ++i) dfact *= i;

    EvalResult res;
    res.method = "paramdiff";
    res.diag.tier = detail::run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        std::vector<JetValue<T>> v;
        if (is_exp) {
            ExpJetStore<T> ks(p, plan.max_leaf_ell, d, policy.max_terms);
            v = run_jet_plan<T>(plan, canon.r, d, [&](int l, BaseCaseVariant var, const detail::LeafRadii& lr) {
                return exp_jet_leaf<T>(l, var, lr, ks);
            });
            res.diag.kernel_calls += ks.calls;
        } else {
            GaussJetStore<T> ks(p, plan.max_leaf_ell, d, policy.max_terms);
            v = run_jet_plan<T>(plan, canon.r, d, [&](int l, BaseCaseVariant var, const detail::LeafRadii& lr) {
                return gauss_jet_leaf<T>(l, var, lr, ks);
            });
            res.diag.kernel_calls += ks.calls;
        }
        const JetValue<T>& top = v.back();
        double value = dfact * to_double(top.re.c[d]);
        double err = dfact * detail::rounding_error<T>(top.scale[d]);
        bool ok = detail::accurate_enough(value, err, policy.tolerance);
        if (!ok && !last) {
            ++res.diag.escalations;
            return false;
        }
        res.value = value;
        res.im_residual = dfact * to_double(top.im.c[d]);
        res.error_estimate = err;
        res.diag.quality_ok = ok;
        return true;
    });
    res.diag.base_cases = plan.leaf_count();
    res.diag.amplification = detail::plan_amplification(plan, canon.r);
    if (res.diag.amplification > 1e6) {
        res.diag.conditioning_warning = true;
        res.diag.notes.push_back("recursion coefficient amplification above 1e6");
    }
    if (!reality_bound_ok(res.value, res.im_residual)) {
        res.diag.quality_ok = false;
        res.diag.notes.push_back("imaginary residual above the reality bound");
    }
    if (is_exp && p * p / *std::max_element(spec.r.begin(), spec.r.end()) < 1e-4) {
        res.diag.low_confidence = true;
        res.diag.notes.push_back("p^2/r < 1e-4: Legendre arguments close to the branch cut");
    }
    return res;
}

FiniteDifferenceReport finite_difference_weighted(const WeightedIntegralSpec& spec, int max_order) {
    validate(spec);
    const int d = derivative_order(spec);
    Canonical canon = canonicalize(spec.ell, spec.r);
    ReductionPlan plan = reduction_plan(canon.ell, max_order);
    using T = mp100;
    const T P0 = T(spec.damping.p) * T(spec.damping.p);
    const double h = std::max(1e-4, 1e-3 * to_double(P0));
    const PrecisionPolicy defaults;

    // d-th central difference in t, where p^2 = P0 - t
    auto central = [&](const T& step) {
        T sum = 0;
        for (int j = 0; j <= d; ++j) {
            T t = (T(d) / 2 - j) * step;
            T f = plan_value_at<T>(plan, canon.r, spec.damping.kind, P0 - t, defaults.max_terms);
            T w = detail::binom<T>(d, j);
            sum += (j % 2 ? -w : w) * f;
        }
        return T(sum / ipow(step, d));
    };
    FiniteDifferenceReport rep;
    rep.step = h;
    if (d == 0) {
        rep.value = to_double(plan_value_at<T>(plan, canon.r, spec.damping.kind, P0, defaults.max_terms));
        return rep;
    }
    T coarse = central(T(h));
    T fine = central(T(h) / 2);
    T extrap = (4 * fine - coarse) / 3;
    rep.value = to_double(extrap);
    rep.richardson_change = to_double(abs(extrap - fine));
    return rep;
}

}  // namespace trisbf
