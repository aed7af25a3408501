#pragma once

// Scalar-generic special-function kernels. Each routine returns values
// together with an absolute "error scale" S such that the rounding error is
// of order S times the unit roundoff of T; callers use it to decide whether a
// higher tier is needed.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "trisbf/complex.hpp"
#include "trisbf/error.hpp"
#include "trisbf/scalar.hpp"

namespace trisbf::detail {

template <class T> T erfc_of(const T& x) {
    using std::erfc;
    return erfc(x);
}
template <> inline quad erfc_of<quad>(const quad& x) { return boost::multiprecision::erfc(x); }

template <class T> T lgamma_of(const T& x) { return boost::math::lgamma(x); }

template <class T> double mag(const T& x) {
    using std::fabs;
    return to_double(fabs(x));
}
template <class T> double mag(const cplx<T>& z) { return to_double(abs(z)); }

// Number of Poisson terms past which e^-x x^k / k! is below 10^-digits
// relative to the bulk.
inline int poisson_cutoff(double x, int digits) {
    double z = std::sqrt(2.0 * (digits + 3) * std::log(10.0));
    return static_cast<int>(std::ceil(x + z * std::sqrt(x) + z * z)) + 10;
}

// Gamma(two_s / 2)
template <class T> T half_gamma(int two_s) {
    if (two_s <= 0) fail(ErrorKind::domain, "gamma argument must be positive");
    T g;
    int k;
    if (two_s % 2) {
        g = root_pi<T>();
        k = 1;
    } else {
        g = T(1);
        k = 2;
    }
    for (; k < two_s; k += 2) g *= T(k) / 2;
    return g;
}

// Gamma(two_s/2, x) for two_s = 1..two_s_max (index two_s; entry 0 unused).
// Upward recurrence from Gamma(1/2,x) and Gamma(1,x): every step adds two
// positive numbers, so relative accuracy is kept.
template <class T> std::vector<T> upper_gamma_table(int two_s_max, const T& x) {
    using std::exp;
    using std::sqrt;
    if (x < 0) fail(ErrorKind::domain, "incomplete gamma needs x >= 0");
    int top = std::max(two_s_max, 2);
    std::vector<T> g(top + 1);
    T ex = exp(-x);
    T rx = sqrt(x);
    g[1] = root_pi<T>() * erfc_of(rx);
    g[2] = ex;
    T pw = rx * ex;  // x^(1/2) e^-x
    for (int k = 3; k <= top; k += 2) {
        g[k] = T(k - 2) / 2 * g[k - 2] + pw;
        pw *= x;
    }
    pw = x * ex;
    for (int k = 4; k <= top; k += 2) {
        g[k] = T(k - 2) / 2 * g[k - 2] + pw;
        pw *= x;
    }
    return g;
}

// Continuation of Gamma(a, u^2) to signed u used by every Gaussian kernel:
// Gamma(a) - sgn(u)^(2a) * lower_gamma(a, u^2). For negative u and half-odd
// 2a it equals 2 Gamma(a) - Gamma(a, u^2); no subtraction is ever formed.
template <class T>
T gamma_c(int two_a, const T& u, const std::vector<T>& upper_at_u2) {
    const T& up = upper_at_u2[two_a];
    if (u >= 0 || two_a % 2 == 0) return up;
    return 2 * half_gamma<T>(two_a) - up;
}

// Direct two-regime evaluation: series for x < s+1, continued fraction beyond.
template <class T> T upper_incomplete_gamma_direct(int two_s, const T& x, int max_terms) {
    using std::exp;
    using std::fabs;
    using std::log;
    if (two_s <= 0) fail(ErrorKind::domain, "incomplete gamma needs s > 0");
    if (x < 0) fail(ErrorKind::domain, "incomplete gamma needs x >= 0");
    T s = T(two_s) / 2;
    T gs = half_gamma<T>(two_s);
    if (x == 0) return gs;
    T eps = T(unit_roundoff<T>());
    T pref = exp(s * log(x) - x);
    if (x < s + 1) {
        T term = 1 / s, sum = term;
        for (int k = 1; k < max_terms; ++k) {
            term *= x / (s + k);
            sum += term;
            if (fabs(term) < eps * fabs(sum)) return gs - pref * sum;
        }
        fail(ErrorKind::nonconvergence, "incomplete gamma series did not converge");
    }
    // modified Lentz
    const T tiny = T(1e-300);
    T b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
    for (int k = 1; k < max_terms; ++k) {
        T an = -k * (k - s);
        b += 2;
        d = an * d + b;
        if (fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (fabs(c) < tiny) c = tiny;
        d = 1 / d;
        T del = d * c;
        h *= del;
        if (fabs(del - 1) < eps) return pref * h;
    }
    fail(ErrorKind::nonconvergence, "incomplete gamma continued fraction did not converge");
}

// Poisson weights e^-x x^i / i! for i = 0..K, built outward from the mode so
// that nothing overflows or underflows prematurely.
template <class T> std::vector<T> poisson_weights(int K, const T& x) {
    using std::exp;
    using std::floor;
    using std::log;
    std::vector<T> w(K + 1, T(0));
    if (x == 0) {
        w[0] = 1;
        return w;
    }
    int mode = std::min(K, static_cast<int>(to_double(floor(x))));
    w[mode] = exp(-x + mode * log(x) - lgamma_of(T(mode + 1)));
    for (int i = mode; i < K; ++i) w[i + 1] = w[i] * x / (i + 1);
    for (int i = mode; i > 0; --i) w[i - 1] = w[i] * i / x;
    return w;
}

// g[i] = lower_gamma(s0 + i, x) / i!, s0 = two_s0/2 in {1/2, 1}, i = 0..K.
// Downward recurrence (positive terms) from a series at the top.
template <class T> std::vector<T> lower_gamma_table(int two_s0, int K, const T& x, int max_terms) {
    using std::sqrt;
    std::vector<T> g(K + 1, T(0));
    if (x == 0) return g;
    T s0 = T(two_s0) / 2;
    T xs0 = two_s0 == 2 ? x : sqrt(x);
    std::vector<T> pw = poisson_weights(K, x);
    T s = s0 + K;
    T eps = T(unit_roundoff<T>());
    T term = 1 / s, sum = term;
    int k = 1;
    for (; k < max_terms; ++k) {
        term *= x / (s + k);
        sum += term;
        if (term < eps * sum) break;
    }
    if (k == max_terms) fail(ErrorKind::nonconvergence, "lower incomplete gamma series did not converge");
    g[K] = xs0 * pw[K] * sum;
    for (int i = K - 1; i >= 0; --i) g[i] = (g[i + 1] * (i + 1) + xs0 * pw[i]) / (s0 + i);
    return g;
}

// sum_k (c-1)/(c-1+k) * lower_gamma(a+k, x) / k!, a = two_a/2, c = two_c/2 > 1.
// Equals x^a * sum_k (-x)^k / ((c)_k (a+k)); every term is positive.
template <class T>
T j_series(int two_a, int two_c, const std::vector<T>& table_half, const std::vector<T>& table_int,
           const T& x) {
    if (x == 0) return T(0);
    const std::vector<T>& g = (two_a % 2) ? table_half : table_int;
    int j = (two_a % 2) ? (two_a - 1) / 2 : two_a / 2 - 1;
    T cm1 = T(two_c - 2) / 2;
    T eps = T(unit_roundoff<T>());
    T pk = 1;
    for (int i = 2; i <= j; ++i) pk *= i;
    T sum = 0;
    int small = 0;
    int limit = static_cast<int>(g.size()) - j;
    double xd = to_double(x);
    for (int k = 0; k < limit; ++k) {
        T term = cm1 / (cm1 + k) * g[j + k] * pk;
        sum += term;
        if (k > xd && term < eps * sum) {
            if (++small == 3) return sum;
        } else {
            small = 0;
        }
        pk = pk * (j + k + 1) / (k + 1);
    }
    fail(ErrorKind::nonconvergence, "incomplete-gamma series table too short");
}

// M_m(y) = int_0^y t^m D(t) dt (D = Dawson's function), m = 0..mmax, with
// absolute error scales. Small |y|: the alternating 2F2 series; larger |y|:
// the positive series 1/2 sum_k lower_gamma(k+1+m/2, y^2) / (k! (2k+1)).
template <class T> struct DawsonMoments {
    std::vector<T> m;
    std::vector<double> scale;
    bool series_path = true;
};

template <class T>
DawsonMoments<T> dawson_moments(int mmax, const T& y, double series_limit, int max_terms) {
    using std::fabs;
    DawsonMoments<T> out;
    out.m.assign(mmax + 1, T(0));
    out.scale.assign(mmax + 1, 0.0);
    if (y == 0) return out;
    T ay = fabs(y);
    T x = ay * ay;
    T eps = T(unit_roundoff<T>());
    if (to_double(x) <= series_limit) {
        out.series_path = true;
        T ypow = x;  // |y|^(m+2)
        for (int mm = 0; mm <= mmax; ++mm) {
            T b = T(mm + 2) / 2;
            T t = 1, sum = 1, abssum = 1;
            int small = 0, k = 0;
            for (k = 0; k < max_terms; ++k) {
                t *= -x / (T(3) / 2 + k);
                T term = b / (b + k + 1) * t;
                sum += term;
                abssum += fabs(term);
                if (fabs(term) < eps * fabs(sum)) {
                    if (++small == 3) break;
                } else {
                    small = 0;
                }
            }
            if (k == max_terms) fail(ErrorKind::nonconvergence, "2F2 series did not converge");
            T f = ypow / (mm + 2);
            out.m[mm] = f * sum;
            out.scale[mm] = mag(f) * (to_double(abssum) + 4 * mag(sum));
            ypow *= ay;
        }
    } else {
        out.series_path = false;
        int digits = static_cast<int>(-std::log10(unit_roundoff<T>()));
        int K = poisson_cutoff(to_double(x), digits) + mmax / 2 + 2;
        std::vector<T> th = lower_gamma_table(1, K, x, max_terms);
        std::vector<T> ti = lower_gamma_table(2, K, x, max_terms);
        for (int mm = 0; mm <= mmax; ++mm) {
            const std::vector<T>& g = (mm % 2) ? th : ti;
            int j = (mm % 2) ? (mm + 1) / 2 : mm / 2;
            T pk = 1;
            for (int i = 2; i <= j; ++i) pk *= i;
            T sum = 0;
            int small = 0, k = 0;
            double xd = to_double(x);
            for (k = 0; j + k <= K; ++k) {
                T term = g[j + k] * pk / (2 * k + 1);
                sum += term;
                if (k > xd && term < eps * sum) {
                    if (++small == 3) break;
                } else {
                    small = 0;
                }
                pk = pk * (j + k + 1) / (k + 1);
            }
            if (j + k > K) fail(ErrorKind::nonconvergence, "Dawson moment table too short");
            out.m[mm] = sum / 2;
            // the downward table recurrence drifts by up to ~K roundings
            out.scale[mm] = (8 + 2.0 * K) * mag(out.m[mm]);
        }
    }
    if (y < 0) {
        // M_m(-y) = (-1)^m M_m(y)
        for (int mm = 1; mm <= mmax; mm += 2) out.m[mm] = -out.m[mm];
    }
    return out;
}

// Dawson's function D(y) = y * sum_j P_j(y^2) / (2j+1) with Poisson weights P_j.
template <class T> T dawson(const T& y, int max_terms) {
    using std::fabs;
    T x = y * y;
    if (x == 0) return T(0);
    int digits = static_cast<int>(-std::log10(unit_roundoff<T>()));
    int K = poisson_cutoff(to_double(x), digits);
    if (K > max_terms) fail(ErrorKind::nonconvergence, "Dawson series too long");
    std::vector<T> w = poisson_weights(K, x);
    T sum = 0;
    for (int j = K; j >= 0; --j) sum += w[j] / (2 * j + 1);
    return y * sum;
}

// Legendre functions of the second kind, Q_0..Q_lmax at complex z off [-1,1].
template <class T> struct QSequence {
    std::vector<cplx<T>> q;
    std::vector<double> scale;
    bool backward = false;
};

template <class T> cplx<T> legendre_q0(const cplx<T>& z) {
    T eps = T(unit_roundoff<T>());
    if (abs(z) > 2) {
        // atanh(1/z) = sum w^(2k+1)/(2k+1)
        cplx<T> w = cplx<T>(T(1)) / z;
        cplx<T> w2 = w * w, pw = w, sum = w;
        for (int k = 1; k < 100000; ++k) {
            pw *= w2;
            cplx<T> t = pw / T(2 * k + 1);
            sum += t;
            if (abs(t) < eps * abs(sum)) break;
        }
        return sum;
    }
    cplx<T> r = (z + cplx<T>(T(1))) / (z - cplx<T>(T(1)));
    return log(r) * T(0.5);
}

template <class T> QSequence<T> legendre_q_sequence_t(int lmax, const cplx<T>& z, int max_terms) {
    using std::fabs;
    if (lmax < 0) fail(ErrorKind::domain, "negative Legendre order");
    if (z.im == 0 && fabs(z.re) <= 1) fail(ErrorKind::argument_on_cut, "Legendre Q argument lies on the cut [-1,1]");
    QSequence<T> out;
    out.q.resize(lmax + 1);
    out.scale.assign(lmax + 1, 0.0);
    cplx<T> q0 = legendre_q0(z);
    out.q[0] = q0;
    out.scale[0] = 4 * mag(q0);
    if (lmax == 0) return out;

    std::complex<double> zd(to_double(z.re), to_double(z.im));
    std::complex<double> w = std::sqrt(zd * zd - 1.0);
    double rho = std::max(std::abs(zd + w), std::abs(zd - w));
    double zabs = std::abs(zd);
    T eps = T(unit_roundoff<T>());

    auto forward = [&]() {
        out.backward = false;
        out.q[1] = z * q0 - cplx<T>(T(1));
        out.scale[1] = zabs * out.scale[0] + 1 + mag(out.q[1]);
        for (int l = 1; l < lmax; ++l) {
            out.q[l + 1] = (z * out.q[l] * T(2 * l + 1) - out.q[l - 1] * T(l)) / T(l + 1);
            out.scale[l + 1] = ((2 * l + 1) * zabs * out.scale[l] + l * out.scale[l - 1]) / (l + 1) +
                               mag(out.q[l + 1]);
        }
        for (int l = 0; l <= lmax; ++l)
            if (!std::isfinite(out.scale[l])) fail(ErrorKind::overflow, "Legendre Q overflow");
    };

    if (std::pow(rho, 2.0 * lmax) <= 1e3) {
        forward();
        return out;
    }

    // ratio Q_L / Q_{L-1} by continued fraction (modified Lentz)
    const int L = lmax;
    const T tiny = T(1e-300);
    cplx<T> f(tiny), C(tiny), D(T(0));
    bool converged = false;
    for (int j = 1; j <= max_terms; ++j) {
        cplx<T> a = j == 1 ? cplx<T>(T(L)) : cplx<T>(-T(L + j - 1) * T(L + j - 1));
        cplx<T> b = z * T(2 * L + 2 * j - 1);
        D = b + a * D;
        if (abs(D) < tiny) D = cplx<T>(tiny);
        C = b + a / C;
        if (abs(C) < tiny) C = cplx<T>(tiny);
        D = cplx<T>(T(1)) / D;
        cplx<T> del = C * D;
        f *= del;
        if (abs(del - cplx<T>(T(1))) < eps) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        forward();
        return out;
    }
    out.backward = true;
    std::vector<cplx<T>>& y = out.q;
    y[L] = f;
    y[L - 1] = cplx<T>(T(1));
    const T big = T(1e100);
    for (int l = L - 1; l >= 1; --l) {
        y[l - 1] = (z * y[l] * T(2 * l + 1) - y[l + 1] * T(l + 1)) / T(l);
        if (abs(y[l - 1]) > big) {
            for (int k = l - 1; k <= L; ++k) y[k] /= big;
        }
    }
    cplx<T> norm = q0 / y[0];
    for (int l = 0; l <= L; ++l) {
        y[l] = l == 0 ? q0 : y[l] * norm;
        out.scale[l] = (8 + 2 * L) * mag(y[l]);
        if (!std::isfinite(out.scale[l])) fail(ErrorKind::overflow, "Legendre Q overflow");
    }
    return out;
}

// Taylor coefficients of Q_l(z0 + d) in d, from the Legendre equation.
template <class T>
std::vector<cplx<T>> legendre_q_taylor(int ell, const cplx<T>& z0, const cplx<T>& q_l,
                                       const cplx<T>& q_lm1, int order) {
    std::vector<cplx<T>> a(order + 1);
    a[0] = q_l;
    cplx<T> one(T(1));
    cplx<T> omz2 = one - z0 * z0;
    if (order >= 1) {
        if (ell == 0)
            a[1] = one / omz2;
        else
            a[1] = (z0 * q_l - q_lm1) * T(ell) / (-omz2);
    }
    for (int k = 0; k + 2 <= order; ++k) {
        cplx<T> num = z0 * a[k + 1] * T(2 * (k + 1) * (k + 1)) + a[k] * T(k * (k + 1) - ell * (ell + 1));
        a[k + 2] = num / (omz2 * T((k + 2) * (k + 1)));
    }
    return a;
}

// Generalized hypergeometric series with real parameters and complex argument.
template <class T> struct PfqResult {
    cplx<T> value;
    double max_partial = 0;  // largest |partial sum| seen
    double abs_sum = 0;      // sum of |term|
    int terms = 0;
};

template <class T>
PfqResult<T> pfq_series(const std::vector<T>& upper, const std::vector<T>& lower, const cplx<T>& x, int max_terms) {
    using std::fabs;
    using std::floor;
    for (const T& b : lower)
        if (b <= 0 && b == floor(b)) fail(ErrorKind::pole, "lower parameter is a non-positive integer");
    PfqResult<T> r;
    cplx<T> term(T(1)), sum(T(1));
    r.max_partial = 1;
    r.abs_sum = 1;
    if (x.re == 0 && x.im == 0) {
        r.value = sum;
        return r;
    }
    T eps = T(unit_roundoff<T>());
    int small = 0;
    for (int k = 0; k < max_terms; ++k) {
        T ratio = T(1) / T(k + 1);
        for (const T& a : upper) ratio *= a + k;
        for (const T& b : lower) ratio /= b + k;
        term = term * x * ratio;
        sum += term;
        double at = mag(term);
        r.abs_sum += at;
        r.max_partial = std::max(r.max_partial, mag(sum));
        r.terms = k + 1;
        if (abs(term) <= eps * abs(sum)) {
            if (++small == 3) {
                r.value = sum;
                return r;
            }
        } else {
            small = 0;
        }
    }
    fail(ErrorKind::nonconvergence, "pFq series did not converge within the term limit");
}

}  // namespace trisbf::detail
