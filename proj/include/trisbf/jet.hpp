#pragma once

// Truncated Taylor series in one variable t, coefficients c[k] = f^(k)(0)/k!.
// Used to push derivatives with respect to -p^2 through the closed forms.

#include <array>
#include <cmath>
#include <stdexcept>

namespace trisbf {

inline constexpr int max_jet_order = 6;

template <class T> struct Jet {
    int n = 0;  // highest order carried
    std::array<T, max_jet_order + 1> c{};

    Jet() = default;
    Jet(const T& v) { c[0] = v; }
    Jet(const T& v, int order) : n(order) { c[0] = v; }

    static Jet variable(const T& v, int order) {
        Jet j(v, order);
        if (order >= 1) j.c[1] = T(1);
        return j;
    }

    Jet& operator+=(const Jet& o) {
        n = std::max(n, o.n);
        for (int k = 0; k <= o.n; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        n = std::max(n, o.n);
        for (int k = 0; k <= o.n; ++k) c[k] -= o.c[k];
        return *this;
    }
    Jet& operator*=(const T& s) {
        for (int k = 0; k <= n; ++k) c[k] *= s;
        return *this;
    }
    Jet& operator/=(const T& s) {
        for (int k = 0; k <= n; ++k) c[k] /= s;
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) {
        for (int k = 0; k <= a.n; ++k) a.c[k] = -a.c[k];
        return a;
    }
    friend Jet operator*(Jet a, const T& s) { return a *= s; }
    friend Jet operator*(const T& s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, const T& s) { return a /= s; }
    friend Jet operator+(Jet a, const T& s) { a.c[0] += s; return a; }
    friend Jet operator-(Jet a, const T& s) { a.c[0] -= s; return a; }
    friend Jet operator+(const T& s, Jet a) { a.c[0] += s; return a; }
    friend Jet operator-(const T& s, const Jet& a) { return -a + s; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        r.n = std::max(a.n, b.n);
        for (int k = 0; k <= r.n; ++k) {
            T s(0);
            for (int i = 0; i <= k; ++i)
                if (i <= a.n && k - i <= b.n) s += a.c[i] * b.c[k - i];
            r.c[k] = s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        r.n = std::max(a.n, b.n);
        for (int k = 0; k <= r.n; ++k) {
            T s = k <= a.n ? a.c[k] : T(0);
            for (int i = 1; i <= k && i <= b.n; ++i) s -= b.c[i] * r.c[k - i];
            r.c[k] = s / b.c[0];
        }
        return r;
    }
    friend Jet operator/(const T& s, const Jet& b) { return Jet(s, b.n) / b; }
};

template <class T> T jet_value(const Jet<T>& j) { return j.c[0]; }

// Componentwise magnitude; used only to carry error scales.
template <class T> Jet<T> fabs(const Jet<T>& j) {
    using std::fabs;
    Jet<T> r(T(0), j.n);
    for (int k = 0; k <= j.n; ++k) r.c[k] = fabs(j.c[k]);
    return r;
}

// f with f(0) = f0 and df/dt given as a jet; df/dt only needs order n-1.
template <class T> Jet<T> integrate(const T& f0, const Jet<T>& dfdt, int order) {
    Jet<T> r(f0, order);
    for (int k = 1; k <= order; ++k) r.c[k] = (k - 1 <= dfdt.n ? dfdt.c[k - 1] : T(0)) / T(k);
    return r;
}

template <class T> Jet<T> derivative(const Jet<T>& j) {
    Jet<T> r(T(0), j.n > 0 ? j.n - 1 : 0);
    for (int k = 1; k <= j.n; ++k) r.c[k - 1] = j.c[k] * T(k);
    return r;
}

template <class T> Jet<T> exp(const Jet<T>& x) {
    using std::exp;
    // e' = e x'
    Jet<T> e(exp(x.c[0]), x.n);
    Jet<T> dx = derivative(x);
    for (int it = 0; it < x.n; ++it) e = integrate(e.c[0], e * dx, x.n);
    return e;
}

template <class T> Jet<T> sqrt(const Jet<T>& x) {
    using std::sqrt;
    Jet<T> r(sqrt(x.c[0]), x.n);
    for (int k = 1; k <= x.n; ++k) {
        T s = x.c[k];
        for (int i = 1; i < k; ++i) s -= r.c[i] * r.c[k - i];
        r.c[k] = s / (2 * r.c[0]);
    }
    return r;
}

template <class T> Jet<T> ipow(const Jet<T>& x, int k) {
    if (k < 0) return T(1) / ipow(x, -k);
    Jet<T> r(T(1), x.n), b(x);
    while (k) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k) b = b * b;
    }
    return r;
}

// Helpers so generic code can treat plain scalars and jets alike.
template <class N> struct num_traits {
    using real = N;
    static constexpr bool is_jet = false;
    static real value(const N& x) { return x; }
    static N constant(const real& v, int) { return N(v); }
    static int order(const N&) { return 0; }
};
template <class T> struct num_traits<Jet<T>> {
    using real = T;
    static constexpr bool is_jet = true;
    static real value(const Jet<T>& x) { return x.c[0]; }
    static Jet<T> constant(const real& v, int order) { return Jet<T>(v, order); }
    static int order(const Jet<T>& x) { return x.n; }
};

}  // namespace trisbf
