#pragma once

// Kernel tables shared by the base cases. Exponential damping needs Legendre Q
// sequences at (−i p^2 + s) / anchor for a signed pair sum s; Gaussian damping
// needs G and chi factors at signed triple sums ±r1±r2±r3. Keys are the exact
// sums of the input doubles (held in binary128), so identical arguments from
// different grid points or permutations share one entry.

#include <array>
#include <cstdint>
#include <cstring>
#include <map>
#include <utility>
#include <vector>

#include "trisbf/detail/specfun_impl.hpp"
#include "trisbf/specfun.hpp"
#include "trisbf/types.hpp"

namespace trisbf::detail {

template <class T> T binom(int n, int k) {
    if (k < 0 || k > n) return T(0);
    k = std::min(k, n - k);
    T r(1);
    for (int i = 1; i <= k; ++i) r = r * T(n - k + i) / T(i);
    return r;
}

using ExpKey = std::pair<quad, quad>;  // (anchor radius, signed sum of the other two)

// Orders keys by bit pattern: a cache needs only a consistent order, and this
// skips the soft-float compares. Keys are built without -0.
inline unsigned __int128 key_bits(const quad& q) {
    unsigned __int128 b;
    __float128 v = q.backend().value();
    std::memcpy(&b, &v, sizeof b);
    return b;
}

struct QuadKeyLess {
    bool operator()(const quad& a, const quad& b) const { return key_bits(a) < key_bits(b); }
};

struct ExpKeyLess {
    bool operator()(const ExpKey& a, const ExpKey& b) const {
        auto a0 = key_bits(a.first), b0 = key_bits(b.first);
        if (a0 != b0) return a0 < b0;
        return key_bits(a.second) < key_bits(b.second);
    }
};

// x - x is +0 in round-to-nearest; this also clears a -0 from negation
inline quad clean_key(const quad& q) { return q + quad(0); }

template <class T> struct ExpKernelStore {
    struct Entry {
        std::vector<cplx<T>> q;
        std::vector<double> scale;
    };

    T P;  // p^2
    int lmax = 0;
    int max_terms = 10000;
    bool frozen = false;
    std::int64_t calls = 0;
    std::map<ExpKey, Entry, ExpKeyLess> table;

    ExpKernelStore(double p, int lmax_, int max_terms_) : P(T(p) * T(p)), lmax(lmax_), max_terms(max_terms_) {}

    cplx<T> argument(const ExpKey& k) const {
        T ra = from_quad<T>(k.first), s = from_quad<T>(k.second);
        return cplx<T>(s / ra, -P / ra);
    }

    void insert(const ExpKey& k) {
        if (table.count(k)) return;
        auto seq = legendre_q_sequence_t<T>(lmax, argument(k), max_terms);
        calls += lmax + 1;
        table.emplace(k, Entry{std::move(seq.q), std::move(seq.scale)});
    }

    const Entry& get(const ExpKey& k) {
        auto it = table.find(k);
        if (it != table.end()) return it->second;
        if (frozen) fail(ErrorKind::domain, "kernel table is missing an argument");
        insert(k);
        return table.find(k)->second;
    }
};

template <class T> struct GaussKernelStore {
    struct Entry {
        std::vector<T> g;    // G(m, r) = 2^m p^(m+1) Gamma_c((m+1)/2, r/2p)
        std::vector<T> chi;  // chi(m, r) = -i * chi[m]
        std::vector<double> g_scale, chi_scale;
    };

    T p;
    int mmax = 0;
    int max_terms = 10000;
    bool frozen = false;
    std::int64_t calls = 0;
    std::map<quad, Entry, QuadKeyLess> table;

    GaussKernelStore(double p_, int mmax_, int max_terms_) : p(T(p_)), mmax(mmax_), max_terms(max_terms_) {}

    void insert(const quad& key) {
        if (table.count(key)) return;
        T r = from_quad<T>(key);
        T u = r / (2 * p);
        std::vector<T> up = upper_gamma_table<T>(mmax + 1, u * u);
        auto mom = dawson_moments<T>(mmax, u, dawson_path_threshold, max_terms);
        Entry e;
        e.g.resize(mmax + 1);
        e.chi.resize(mmax + 1);
        e.g_scale.resize(mmax + 1);
        e.chi_scale.resize(mmax + 1);
        T twop = 2 * p;
        T pw = p;                            // 2^m p^(m+1)
        T cw = 2 / root_pi<T>() * twop;      // (2/sqrt(pi)) (2p)^(m+1)
        for (int m = 0; m <= mmax; ++m) {
            e.g[m] = pw * gamma_c<T>(m + 1, u, up);
            e.g_scale[m] = 4 * mag(e.g[m]);
            e.chi[m] = cw * mom.m[m];
            e.chi_scale[m] = mag(cw) * mom.scale[m];
            pw *= twop;
            cw *= twop;
        }
        calls += 2 * (mmax + 1);
        table.emplace(key, std::move(e));
    }

    const Entry& get(const quad& k) {
        auto it = table.find(k);
        if (it != table.end()) return it->second;
        if (frozen) fail(ErrorKind::domain, "kernel table is missing an argument");
        insert(k);
        return table.find(k)->second;
    }
};

// A base-case value: complex result plus error scale.
template <class T> struct LeafValue {
    T re, im;
    double scale;
};

// radii in base-case slot order (ra carries the order l)
using LeafRadii = std::array<double, 3>;

inline std::array<ExpKey, 4> exp_leaf_keys(const LeafRadii& r) {
    quad ra(r[0]), rb(r[1]), rc(r[2]);
    // R_{--}, R_{-+}, R_{+-}, R_{++}
    return {ExpKey{ra, clean_key(-rb - rc)}, ExpKey{ra, clean_key(-rb + rc)}, ExpKey{ra, clean_key(rb - rc)},
            ExpKey{ra, clean_key(rb + rc)}};
}

inline std::array<quad, 8> gauss_leaf_keys(const LeafRadii& r) {
    quad ra(r[0]), rb(r[1]), rc(r[2]);
    std::array<quad, 8> k;
    int i = 0;
    for (int s2 : {1, -1})
        for (int s3 : {1, -1}) {
            k[i++] = clean_key(ra + s2 * rb + s3 * rc);
            k[i++] = clean_key(-ra + s2 * rb + s3 * rc);
        }
    return k;
}

template <class T>
LeafValue<T> exp_leaf(int ell, BaseCaseVariant var, const LeafRadii& r, ExpKernelStore<T>& ks) {
    auto keys = exp_leaf_keys(r);
    const auto& mm = ks.get(keys[0]);
    const auto& mp = ks.get(keys[1]);
    const auto& pm = ks.get(keys[2]);
    const auto& pp = ks.get(keys[3]);
    cplx<T> c;
    cplx<T> phase;
    T sign;
    switch (var) {
        case BaseCaseVariant::L00:
            c = mm.q[ell] - mp.q[ell] - pm.q[ell] + pp.q[ell];
            phase = minus_i_pow<T>(ell + 1);
            sign = -1;
            break;
        case BaseCaseVariant::Lm10:
            c = mm.q[ell] - mp.q[ell] + pm.q[ell] - pp.q[ell];
            phase = minus_i_pow<T>(ell);
            sign = -1;
            break;
        default:
            c = mm.q[ell] + mp.q[ell] + pm.q[ell] + pp.q[ell];
            phase = minus_i_pow<T>(ell + 1);
            sign = 1;
            break;
    }
    T f = sign / (4 * T(r[0]) * T(r[1]) * T(r[2]));
    cplx<T> v = phase * c * f;
    double s = mag(f) * (mm.scale[ell] + mp.scale[ell] + pm.scale[ell] + pp.scale[ell]) + mag(v);
    return {v.re, v.im, s};
}

template <class T>
LeafValue<T> gauss_leaf(int ell, BaseCaseVariant var, const LeafRadii& r, GaussKernelStore<T>& ks) {
    using std::fabs;
    auto keys = gauss_leaf_keys(r);
    const T ra(r[0]), rb(r[1]), rc(r[2]);
    static constexpr int line_s2[4] = {1, 1, -1, -1};
    static constexpr int line_s3[4] = {1, -1, 1, -1};
    int sgn[4];
    switch (var) {
        case BaseCaseVariant::L00: sgn[0] = 1, sgn[1] = -1, sgn[2] = -1, sgn[3] = 1; break;
        case BaseCaseVariant::Lm10: sgn[0] = 1, sgn[1] = -1, sgn[2] = 1, sgn[3] = -1; break;
        default: sgn[0] = sgn[1] = sgn[2] = sgn[3] = 1; break;
    }
    // per line and m: G(m, r-) - G(m, r+) and the chi counterpart
    std::array<std::vector<T>, 4> dg, dc, base_pow;
    std::array<std::vector<double>, 4> dsc;
    for (int k = 0; k < 4; ++k) {
        const auto& ep = ks.get(keys[2 * k]);      // +ra + s2 rb + s3 rc
        const auto& em = ks.get(keys[2 * k + 1]);  // -ra + s2 rb + s3 rc
        dg[k].resize(ell + 1);
        dc[k].resize(ell + 1);
        dsc[k].resize(ell + 1);
        base_pow[k].resize(ell + 1);
        for (int m = 0; m <= ell; ++m) {
            dg[k][m] = em.g[m] - ep.g[m];
            dc[k][m] = em.chi[m] - ep.chi[m];
            dsc[k][m] = em.g_scale[m] + ep.g_scale[m] + em.chi_scale[m] + ep.chi_scale[m];
        }
        T base = -line_s2[k] * rb - line_s3[k] * rc;
        T pw(1);  // 0^0 = 1
        for (int e = 0; e <= ell; ++e) {
            base_pow[k][e] = pw;
            pw *= base;
        }
    }
    T sg(0), sc(0);
    double scale = 0;
    T rinv = 1 / ra;
    for (int n = 0; 2 * n <= ell; ++n) {
        T cn = binom<T>(ell, n) * binom<T>(2 * ell - 2 * n, ell) * ipow(rinv, 1 + ell - 2 * n);
        if (n % 2) cn = -cn;
        for (int m = 0; m <= ell - 2 * n; ++m) {
            T cm = cn * binom<T>(ell - 2 * n, m);
            int e = ell - 2 * n - m;
            for (int k = 0; k < 4; ++k) {
                T w = cm * base_pow[k][e];
                if (sgn[k] < 0) w = -w;
                sg += w * dg[k][m];
                sc += w * dc[k][m];
                scale += mag(w) * dsc[k][m];
            }
        }
    }
    cplx<T> pv = minus_i_pow<T>(var == BaseCaseVariant::Lm10 ? ell + 1 : ell);
    if (var == BaseCaseVariant::L00) pv = -pv;
    T pref = root_pi<T>() / (16 * ks.p * rb * rc * ipow(T(2), ell));
    cplx<T> v = pv * cplx<T>(sg, -sc) * pref;
    return {v.re, v.im, mag(pref) * scale + mag(v)};
}

}  // namespace trisbf::detail
