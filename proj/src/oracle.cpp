#include "trisbf/oracle.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "trisbf/error.hpp"

namespace trisbf {

long double sph_bessel_j(int l, long double x) {
    if (l < -1) fail(ErrorKind::domain, "sph_bessel_j: order below -1");
    if (x < 0) fail(ErrorKind::domain, "sph_bessel_j: negative argument");
    if (l == -1) {
        if (x == 0) fail(ErrorKind::pole, "j_{-1} at 0");
        return std::cos(x) / x;
    }
    if (x == 0) return l == 0 ? 1.0L : 0.0L;
    if (x < 1) {
        // power series
        long double t = 1;
        for (int k = 1; k <= l; ++k) t *= x / (2 * k + 1);
        long double sum = t, x2 = -x * x / 2;
        for (int k = 1; k < 60; ++k) {
            t *= x2 / (k * (2.0L * l + 2 * k + 1));
            sum += t;
            if (std::fabs(t) < 1e-22L * std::fabs(sum)) break;
        }
        return sum;
    }
    const long double s = std::sin(x), c = std::cos(x);
    const long double j0 = s / x;
    if (l == 0) return j0;
    const long double j1 = s / (x * x) - c / x;
    if (l == 1) return j1;
    if (x >= l) {
        long double a = j0, b = j1;
        for (int k = 1; k < l; ++k) {
            long double nx = (2 * k + 1) / x * b - a;
            a = b;
            b = nx;
        }
        return b;
    }
    // Miller: downward from well above l, normalised on j0 or j1
    const int top = std::max(l, static_cast<int>(x)) + 50;
    long double up = 0, cur = 1e-300L, at_l = 0, f0 = 0, f1 = 0;
    for (int k = top; k >= 1; --k) {
        long double down = (2 * k + 1) / x * cur - up;
        up = cur;
        cur = down;  // f_{k-1}
        if (std::fabs(cur) > 1e300L) {
            up *= 1e-300L;
            cur *= 1e-300L;
            at_l *= 1e-300L;
        }
        if (k - 1 == l) at_l = cur;
        if (k - 1 == 1) f1 = cur;
        if (k - 1 == 0) f0 = cur;
    }
    return std::fabs(j0) >= std::fabs(j1) ? at_l * (j0 / f0) : at_l * (j1 / f1);
}

long double sph_bessel_modulus(int l, long double x) {
    if (x <= 0) return std::numeric_limits<long double>::infinity();
    if (l == -1 || l == 0) return 1 / x;
    const long double s = std::sin(x), c = std::cos(x);
    // y_l by upward recurrence (always stable)
    long double a = -c / x, b = -c / (x * x) - s / x;
    for (int k = 1; k < l; ++k) {
        long double nx = (2 * k + 1) / x * b - a;
        a = b;
        b = nx;
    }
    long double j = sph_bessel_j(l, x);
    return std::sqrt(j * j + b * b);
}

namespace {

struct Interval {
    long double a, b, value, err, l1;
    bool operator<(const Interval& o) const { return err < o.err; }
};

constexpr int max_intervals = 400000;

struct Integrand {
    std::array<int, 3> ell;
    RadiiTriple r;
    Damping damping;
    int n;

    long double operator()(long double k) const {
        long double p2 = static_cast<long double>(damping.p) * damping.p;
        long double w = damping.kind == DampingKind::exponential ? std::exp(-p2 * k) : std::exp(-p2 * k * k);
        long double v = w * std::pow(k, n);
        for (int i = 0; i < 3; ++i) v *= sph_bessel_j(ell[i], k * r[i]);
        return v;
    }

    // bound on int_K^inf |integrand|
    double tail(double K) const {
        long double env = 1;
        for (int i = 0; i < 3; ++i) env *= sph_bessel_modulus(ell[i], static_cast<long double>(K) * r[i]);
        const double p = damping.p, p2 = p * p;
        double t;
        if (damping.kind == DampingKind::exponential)
            t = boost::math::tgamma(n + 1.0, p2 * K) / std::pow(p2, n + 1);
        else
            t = boost::math::tgamma((n + 1) / 2.0, p2 * K * K) / (2 * std::pow(p, n + 1));
        return static_cast<double>(env) * t;
    }
};

Interval gk(const Integrand& f, long double a, long double b) {
    using K = boost::math::quadrature::gauss_kronrod<long double, 31>;
    using G = boost::math::quadrature::gauss<long double, 15>;
    const auto& x = K::abscissa();
    const auto& wk = K::weights();
    const auto& wg = G::weights();
    const long double mid = (a + b) / 2, half = (b - a) / 2;
    long double f0 = f(mid);
    long double kr = wk[0] * f0, ga = wg[0] * f0, l1 = wk[0] * std::fabs(f0);
    for (size_t i = 1; i < x.size(); ++i) {
        long double lo = f(mid - half * x[i]), hi = f(mid + half * x[i]);
        kr += wk[i] * (lo + hi);
        l1 += wk[i] * (std::fabs(lo) + std::fabs(hi));
        // Gauss nodes are the even Kronrod indices
        if (i % 2 == 0) ga += wg[i / 2] * (lo + hi);
    }
    return {a, b, kr * half, std::fabs(kr - ga) * half, l1 * half};
}

}  // namespace

QuadratureReport quadrature_eval_orders(const std::array<int, 3>& ell, const RadiiTriple& r, const Damping& damping,
                                        int n, double tol) {
    if (!(tol >= 1e-12 && tol <= 1e-4)) fail(ErrorKind::domain, "quadrature tolerance must lie in [1e-12, 1e-4]");
    int singular = 0;
    for (int i = 0; i < 3; ++i) {
        if (ell[i] < -1) fail(ErrorKind::domain, "quadrature orders must be >= -1");
        if (!(r[i] > 0) || !std::isfinite(r[i])) fail(ErrorKind::domain, "radii must be positive and finite");
        singular += ell[i] == -1;
    }
    if (!(damping.p != 0) || !std::isfinite(damping.p)) fail(ErrorKind::domain, "p must be finite and non-zero");
    if (n < 0) fail(ErrorKind::domain, "n must be non-negative");
    if (n - singular <= -1) fail(ErrorKind::domain, "integrand not integrable at k = 0");

    Integrand f{ell, r, {damping.kind, std::fabs(damping.p)}, n};
    const long double width = std::acos(-1.0L) / *std::max_element(r.begin(), r.end());
    const long double eps = std::numeric_limits<long double>::epsilon();

    std::priority_queue<Interval> open;
    std::vector<Interval> settled;  // at the round-off floor
    long double value = 0, err = 0, l1 = 0;
    int panels = 0;
    auto add = [&](const Interval& iv, int sign) {
        value += sign * iv.value;
        err += sign * iv.err;
        l1 += sign * iv.l1;
    };
    auto push = [&](const Interval& iv) {
        add(iv, +1);
        if (iv.err <= 64 * eps * iv.l1)
            settled.push_back(iv);
        else
            open.push(iv);
    };
    auto next_panel = [&] {
        push(gk(f, panels * width, (panels + 1) * width));
        ++panels;
    };
    for (int i = 0; i < 4; ++i) next_panel();

    double tail = f.tail(static_cast<double>(panels * width));
    bool ok = false;
    while (true) {
        const long double goal = tol * std::fabs(value);
        if (err + tail <= goal) {
            ok = true;
            break;
        }
        if (static_cast<int>(open.size() + settled.size()) >= max_intervals) break;
        if (tail > 0.25L * goal) {
            next_panel();
            tail = f.tail(static_cast<double>(panels * width));
            continue;
        }
        if (open.empty()) break;
        Interval worst = open.top();
        open.pop();
        add(worst, -1);
        const long double m = (worst.a + worst.b) / 2;
        push(gk(f, worst.a, m));
        push(gk(f, m, worst.b));
    }

    // exact re-summation in a fixed order
    std::vector<Interval> all = std::move(settled);
    while (!open.empty()) {
        all.push_back(open.top());
        open.pop();
    }
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    long double v = 0, e = 0;
    for (const Interval& iv : all) {
        v += iv.value;
        e += iv.err;
    }
    QuadratureReport rep;
    rep.value = static_cast<double>(v);
    rep.tail_bound = tail;
    rep.error_estimate = static_cast<double>(e) + tail;
    rep.intervals_used = static_cast<int>(all.size());
    rep.truncation_point = static_cast<double>(panels * width);
    if (!ok) {
        std::ostringstream os;
        os.precision(17);
        os << "quadrature could not reach relative tolerance " << tol << "; best value " << rep.value
           << ", error estimate " << rep.error_estimate << " over " << rep.intervals_used << " intervals";
        fail(ErrorKind::tolerance_unreachable, os.str());
    }
    return rep;
}

QuadratureReport quadrature_eval(const WeightedIntegralSpec& spec, double tol) {
    validate(spec);
    return quadrature_eval_orders(spec.ell, spec.r, spec.damping, spec.n, tol);
}

namespace {

// Gauss-Legendre 30 on m equal pieces of [-1, 1]
template <class F> double composite(F f, int m) {
    using G = boost::math::quadrature::gauss<double, 30>;
    double sum = 0, h = 2.0 / m;
    for (int i = 0; i < m; ++i) sum += G::integrate(f, -1 + i * h, -1 + (i + 1) * h);
    return sum;
}

}  // namespace

std::complex<double> cubature_q(const WeightedIntegralSpec& spec, QIntegral which, int zeta, double tol) {
    validate(spec);
    if (spec.damping.kind != DampingKind::gaussian) fail(ErrorKind::domain, "q-integrals exist for gaussian damping only");
    for (int l : spec.ell)
        if (l > 2) fail(ErrorKind::cost_limit, "cubature_q is limited to orders <= 2");
    if (!(tol >= 1e-9)) fail(ErrorKind::domain, "cubature tolerance must be >= 1e-9");
    const int N = spec.n + spec.ell[0] + spec.ell[1] + spec.ell[2];
    if (zeta < 0 || zeta > N) fail(ErrorKind::domain, "zeta outside [0, n + l1 + l2 + l3]");
    const int alpha = N - zeta;
    const double p = std::fabs(spec.damping.p);
    const auto& r = spec.r;
    const auto& ell = spec.ell;

    auto integrand = [&](double s) {
        double y = (s / (2 * p)) * (s / (2 * p));
        if (which == QIntegral::power_law) return std::exp(-y) * std::pow(s, zeta);
        return std::pow(s, N + 1) * boost::math::hypergeometric_1F1(1.0, (alpha + 3) / 2.0, -y);
    };
    auto run = [&](int m) {
        return composite(
            [&](double q1) {
                double w1 = std::pow(1 - q1 * q1, ell[0]);
                return w1 * composite(
                                [&](double q2) {
                                    double w2 = std::pow(1 - q2 * q2, ell[1]);
                                    return w2 * composite(
                                                    [&](double q3) {
                                                        double w3 = std::pow(1 - q3 * q3, ell[2]);
                                                        return w3 * integrand(r[0] * q1 + r[1] * q2 + r[2] * q3);
                                                    },
                                                    m);
                                },
                                m);
            },
            m);
    };
    double coarse = run(1), fine = run(2);
    if (std::fabs(fine - coarse) > tol * std::fabs(fine)) {
        coarse = fine;
        fine = run(4);
        if (std::fabs(fine - coarse) > tol * std::fabs(fine))
            fail(ErrorKind::tolerance_unreachable, "cubature_q did not converge to the requested tolerance");
    }
    if (which == QIntegral::power_law) return boost::math::tgamma((alpha + 1) / 2.0) * fine;
    // (-i)^(alpha+1)
    static const std::complex<double> phase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return phase[(alpha + 1) % 4] * (2.0 / (alpha + 1) * std::pow(2 * p, -(alpha + 1)) * fine);
}

}  // namespace trisbf
