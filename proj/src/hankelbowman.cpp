#include "trisbf/hankelbowman.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "trisbf/detail/kernels.hpp"
#include "trisbf/detail/specfun_impl.hpp"
#include "trisbf/detail/tiers.hpp"
#include "trisbf/expdamp.hpp"
#include "trisbf/specfun.hpp"

namespace trisbf {

namespace {

using detail::binom;
using detail::mag;

template <class T> struct KVal {
    T v;
    double s;  // absolute error scale
};

// i^k
template <class T> cplx<T> i_pow(int k) { return minus_i_pow<T>(-k); }

// Kernel values at one scaled radius sum u = rs/2p.
template <class T> class UKernel {
  public:
    UKernel(const T& u, int two_gamma_max, int two_j_max, int two_c_max, int pow_max, int max_terms)
        : u_(u), two_j_max_(two_j_max), two_c_max_(two_c_max) {
        using std::fabs;
        T au = fabs(u);
        x_ = u * u;
        up_ = detail::upper_gamma_table<T>(two_gamma_max, x_);
        for (int k = 1; k < static_cast<int>(up_.size()); ++k) up_[k] = detail::gamma_c<T>(k, u_, up_);
        apow_.resize(pow_max + 1);
        T pw(1);
        for (int k = 0; k <= pow_max; ++k) {
            apow_[k] = pw;
            pw *= au;
        }
        if (x_ != 0) {
            int digits = static_cast<int>(-std::log10(unit_roundoff<T>()));
            K_ = detail::poisson_cutoff(to_double(x_), digits) + two_j_max / 2 + 2;
            lo_half_ = detail::lower_gamma_table<T>(1, K_, x_, max_terms);
            lo_int_ = detail::lower_gamma_table<T>(2, K_, x_, max_terms);
        }
        jv_.resize((two_j_max + 1) * (two_c_max + 1));
        jset_.assign(jv_.size(), 0);
    }

    // u^k keeping the sign of u
    T spow(int k) const { return (u_ < 0 && (k % 2)) ? T(-apow_[k]) : apow_[k]; }

    T gc(int two_a) const { return up_[two_a]; }

    // x^a sum_k (-x)^k / ((c)_k (a + k))
    const T& jn(int two_a, int two_c) {
        size_t i = static_cast<size_t>(two_a) * (two_c_max_ + 1) + two_c;
        if (!jset_[i]) {
            jv_[i] = x_ == 0 ? T(0) : detail::j_series<T>(two_a, two_c, lo_half_, lo_int_, x_);
            jset_[i] = 1;
            ++calls;
        }
        return jv_[i];
    }

    // Z - Y with doubled exponents tb = 2 beta, te = 2 eps, th = 2 eta
    KVal<T> zy(int tb, int te, int th) const {
        int k1 = th + te + 4, k2 = th + 2;
        T z1 = spow(k1) * gc(tb + 2), z2 = gc(tb + th + te + 6);
        T y1 = spow(k2) * gc(tb + te + 4), y2 = gc(tb + te + th + 6);
        T fz = T(2) / k1, fy = T(2) / k2;
        T v = (z1 - z2) * fz - (y1 - y2) * fy;
        double s = mag(fz) * (mag(z1) + mag(z2)) + mag(fy) * (mag(y1) + mag(y2)) + mag(v);
        return {v, s};
    }

    // 2/((alpha+1)(kappa+1)(lambda+1)(rho+1)) u^(2 rho + 2) 4F4(rho+1, lambda+1, 1, kappa+1;
    // rho+2, lambda+2, (alpha+3)/2, kappa+2; -u^2), through partial fractions in the series index.
    KVal<T> hg(int alpha, int two_kappa, int E, int H) {
        if (x_ == 0) return {T(0), 0.0};
        const int two_l = two_kappa + E + 1, two_r = two_l + H + 1;
        const int a2[3] = {two_kappa + 2, two_l + 2, two_r + 2};
        const int two_c = alpha + 3;
        T sum(0);
        double abs_sum = 0;
        for (int j = 0; j < 3; ++j) {
            T w(1);
            for (int i = 0; i < 3; ++i)
                if (i != j) w *= T(2) / (a2[i] - a2[j]);
            T term = w * apow_[two_r + 2 - a2[j]] * jn(a2[j], two_c);
            sum += term;
            abs_sum += mag(term);
        }
        T f = T(2) / (alpha + 1);
        if (u_ < 0 && (two_r % 2)) f = -f;
        T v = f * sum;
        return {v, mag(f) * abs_sum * 8 + mag(v)};
    }

    // For the full evaluation the zeta sum of the hypergeometric part folds into
    // S(a) = sum_zeta C(N,zeta) (-1)^zeta 2/(alpha+1) jn(a, alpha+3), alpha = N - zeta.
    // Swapping the sums, sum_zeta C(N,zeta) (-1)^zeta 2/(alpha+1+2k) = 2 (-1)^N N! / prod_i (2k+1+i),
    // so S(a) is a positive series in lower_gamma(a+k, x)/k!.
    void fold_zeta(int N) {
        sfold_.assign(two_j_max_ + 1, T(0));
        sfold_abs_.assign(two_j_max_ + 1, 0.0);
        if (x_ == 0) return;
        const int K = K_;
        std::vector<T> R(K + 1);
        T nf(2);
        for (int i = 2; i <= N; ++i) nf *= i;
        for (int k = 0; k <= K; ++k) {
            T den(1);
            for (int i = 0; i <= N; ++i) den *= T(2 * k + 1 + i);
            R[k] = nf / den;
        }
        const T eps = T(unit_roundoff<T>());
        const double xd = to_double(x_);
        for (int two_a = N + 2; two_a <= two_j_max_; ++two_a) {
            const std::vector<T>& g = (two_a % 2) ? lo_half_ : lo_int_;
            int j = (two_a % 2) ? (two_a - 1) / 2 : two_a / 2 - 1;
            T pk(1);
            for (int i = 2; i <= j; ++i) pk *= i;
            T sum(0);
            int small = 0, k = 0;
            for (; j + k <= K; ++k) {
                T term = g[j + k] * pk * R[k];
                sum += term;
                if (k > xd && term < eps * sum) {
                    if (++small == 3) break;
                } else {
                    small = 0;
                }
                pk = pk * (j + k + 1) / (k + 1);
            }
            if (j + k > K) fail(ErrorKind::nonconvergence, "folded incomplete-gamma series table too short");
            ++calls;
            sfold_[two_a] = (N % 2) ? T(-sum) : sum;
            sfold_abs_[two_a] = 8 * mag(sum);
        }
    }

    // hg() with the folded S in place of the alpha-dependent factor and jn
    KVal<T> hg_folded(int two_kappa, int E, int H) const {
        if (x_ == 0) return {T(0), 0.0};
        const int two_l = two_kappa + E + 1, two_r = two_l + H + 1;
        const int a2[3] = {two_kappa + 2, two_l + 2, two_r + 2};
        T sum(0);
        double abs_sum = 0;
        for (int j = 0; j < 3; ++j) {
            T w(1);
            for (int i = 0; i < 3; ++i)
                if (i != j) w *= T(2) / (a2[i] - a2[j]);
            w *= apow_[two_r + 2 - a2[j]];
            sum += w * sfold_[a2[j]];
            abs_sum += mag(w) * sfold_abs_[a2[j]];
        }
        if (u_ < 0 && (two_r % 2)) sum = -sum;
        return {sum, abs_sum * 8 + mag(sum)};
    }

    std::int64_t calls = 0;

  private:
    T u_, x_;
    int two_j_max_, two_c_max_;
    int K_ = 0;
    std::vector<T> up_, apow_, lo_half_, lo_int_, jv_, sfold_;
    std::vector<double> sfold_abs_;
    std::vector<char> jset_;
};

// The index sum grouped by the three exponents the kernels see:
// A = 2b-c, E = c+2d-g-h, H = g+2m-t-u-v, per sign line (s2, s3).
template <class T> struct Line {
    int s2, s3;
    int iu_plus, iu_minus;  // kernel slots for (+r1 + s2 r2 + s3 r3) and (-r1 + ...)
    std::vector<T> w;        // [A][E][H]
    std::vector<double> wabs;
};

template <class T> class HBEngine {
  public:
    HBEngine(const WeightedIntegralSpec& spec, int max_terms) : ell_(spec.ell), n_(spec.n) {
        using std::fabs;
        for (int i = 0; i < 3; ++i) r_[i] = T(spec.r[i]);
        p_ = fabs(T(spec.damping.p));
        q_ = 2 * p_;
        L_ = ell_[0] + ell_[1] + ell_[2];
        N_ = n_ + L_;
        nA_ = 2 * ell_[2] + 1;
        nE_ = 2 * ell_[2] + 2 * ell_[1] + 1;
        nH_ = 2 * ell_[1] + 2 * ell_[0] + 1;
        build_lines();
        int two_gamma_max = N_ + (nA_ - 1) + (nE_ - 1) + (nH_ - 1) + 4;
        int two_j_max = N_ + (nA_ - 1) + (nE_ - 1) + (nH_ - 1) + 4;
        int pow_max = (nE_ - 1) + (nH_ - 1) + 4;
        for (auto& ln : lines_) {
            T up = (r_[0] + ln.s2 * r_[1] + ln.s3 * r_[2]) / q_;
            T um = (-r_[0] + ln.s2 * r_[1] + ln.s3 * r_[2]) / q_;
            ln.iu_plus = static_cast<int>(kern_.size());
            kern_.emplace_back(up, two_gamma_max, two_j_max, N_ + 3, pow_max, max_terms);
            ln.iu_minus = static_cast<int>(kern_.size());
            kern_.emplace_back(um, two_gamma_max, two_j_max, N_ + 3, pow_max, max_terms);
        }
    }

    int N() const { return N_; }
    const T& p() const { return p_; }
    const std::array<T, 3>& r() const { return r_; }
    UKernel<T>& kernel(int i) { return kern_[i]; }
    const std::vector<Line<T>>& lines() const { return lines_; }

    std::int64_t kernel_calls() const {
        std::int64_t c = 0;
        for (const auto& k : kern_) c += k.calls;
        // one incomplete-gamma table per radius sum
        return c + static_cast<std::int64_t>(kern_.size());
    }

    // sum over lines and (A,E,H) of s2 s3 w Gamma((alpha+1)/2)/(eps+1) (ZY(u+) - ZY(u-))
    KVal<T> pl_sum(int zeta) {
        const int alpha = N_ - zeta;
        T g = detail::half_gamma<T>(alpha + 1);
        T acc(0);
        double s = 0;
        for (auto& ln : lines_) {
            for (int A = 0; A < nA_; ++A)
                for (int E = 0; E < nE_; ++E)
                    for (int H = 0; H < nH_; ++H) {
                        size_t i = idx(A, E, H);
                        if (ln.wabs[i] == 0) continue;
                        T wpl = g * 2 / T(E + 1);
                        if (ln.s2 * ln.s3 < 0) wpl = -wpl;
                        auto kp = kern_[ln.iu_plus].zy(zeta + A - 1, E - 1, H - 1);
                        auto km = kern_[ln.iu_minus].zy(zeta + A - 1, E - 1, H - 1);
                        T dk = kp.v - km.v;
                        T term = ln.w[i] * wpl * dk;
                        acc += term;
                        s += mag(ln.w[i] * wpl) * (kp.s + km.s) + ln.wabs[i] * mag(wpl) * mag(dk);
                    }
        }
        return {acc, s};
    }

    // same with the hypergeometric kernel, phase (-i)^(alpha+1) left out
    KVal<T> hg_sum(int zeta) {
        const int alpha = N_ - zeta;
        T acc(0);
        double s = 0;
        for (auto& ln : lines_) {
            for (int A = 0; A < nA_; ++A)
                for (int E = 0; E < nE_; ++E)
                    for (int H = 0; H < nH_; ++H) {
                        size_t i = idx(A, E, H);
                        if (ln.wabs[i] == 0) continue;
                        auto kp = kern_[ln.iu_plus].hg(alpha, N_ + A, E, H);
                        auto km = kern_[ln.iu_minus].hg(alpha, N_ + A, E, H);
                        T dk = kp.v - km.v;
                        T w = ln.s2 * ln.s3 < 0 ? T(-ln.w[i]) : ln.w[i];
                        acc += w * dk;
                        s += mag(w) * (kp.s + km.s) + ln.wabs[i] * mag(dk);
                    }
        }
        return {acc, s};
    }

    // sum_zeta C(N,zeta) [ i^zeta P_zeta + (-i)^(N+1) (-1)^zeta H_zeta ] as (re, im)
    // with error scales; the Z-Y kernel depends on zeta only through zeta + A.
    void total(T& re, T& im, double& sre, double& sim) {
        re = im = T(0);
        sre = sim = 0;
        const int nJ = N_ + nA_;
        std::vector<T> gam(N_ + 1);
        for (int zeta = 0; zeta <= N_; ++zeta) gam[zeta] = binom<T>(N_, zeta) * detail::half_gamma<T>(N_ - zeta + 1);
        for (auto& k : kern_) k.fold_zeta(N_);
        T hsum(0);
        double hs = 0;
        std::vector<T> dzy(static_cast<size_t>(nJ) * nE_ * nH_);
        std::vector<double> dzs(dzy.size());
        for (auto& ln : lines_) {
            auto& kp = kern_[ln.iu_plus];
            auto& km = kern_[ln.iu_minus];
            const int sl = ln.s2 * ln.s3;
            for (int j = 0; j < nJ; ++j)
                for (int E = 0; E < nE_; ++E)
                    for (int H = 0; H < nH_; ++H) {
                        auto a = kp.zy(j - 1, E - 1, H - 1);
                        auto b = km.zy(j - 1, E - 1, H - 1);
                        size_t i = (static_cast<size_t>(j) * nE_ + E) * nH_ + H;
                        dzy[i] = a.v - b.v;
                        dzs[i] = a.s + b.s;
                    }
            for (int A = 0; A < nA_; ++A)
                for (int E = 0; E < nE_; ++E)
                    for (int H = 0; H < nH_; ++H) {
                        size_t i = idx(A, E, H);
                        if (ln.wabs[i] == 0) continue;
                        T w = sl < 0 ? T(-ln.w[i]) : ln.w[i];
                        T we = w * 2 / T(E + 1);
                        double wea = mag(we), wra = ln.wabs[i] * 2 / (E + 1);
                        for (int zeta = 0; zeta <= N_; ++zeta) {
                            size_t jz = (static_cast<size_t>(zeta + A) * nE_ + E) * nH_ + H;
                            T t = we * gam[zeta] * dzy[jz];
                            double ts = mag(gam[zeta]) * (wea * dzs[jz] + wra * mag(dzy[jz]));
                            // i^zeta
                            switch (zeta % 4) {
                                case 0: re += t; sre += ts; break;
                                case 1: im += t; sim += ts; break;
                                case 2: re -= t; sre += ts; break;
                                default: im -= t; sim += ts; break;
                            }
                        }
                        auto hp = kp.hg_folded(N_ + A, E, H);
                        auto hm = km.hg_folded(N_ + A, E, H);
                        T dh = hp.v - hm.v;
                        hsum += w * dh;
                        hs += mag(w) * (hp.s + hm.s) + ln.wabs[i] * mag(dh);
                    }
        }
        cplx<T> hph = minus_i_pow<T>(N_ + 1);
        re += hph.re * hsum;
        im += hph.im * hsum;
        sre += mag(hph.re) * hs;
        sim += mag(hph.im) * hs;
    }

    // p^3 / (r1 r2 r3)
    T volume_factor() const { return p_ * p_ * p_ / (r_[0] * r_[1] * r_[2]); }

    // r1^l1 r2^l2 r3^l3 / (2^(L+4) l1! l2! l3!) p^3/(r1 r2 r3)
    T prefactor() const {
        T f = volume_factor() / ipow(T(2), L_ + 4);
        for (int i = 0; i < 3; ++i) {
            f *= ipow(r_[i], ell_[i]);
            for (int k = 2; k <= ell_[i]; ++k) f /= k;
        }
        return f;
    }

  private:
    size_t idx(int A, int E, int H) const { return (static_cast<size_t>(A) * nE_ + E) * nH_ + H; }

    void build_lines() {
        const int l1 = ell_[0], l2 = ell_[1], l3 = ell_[2];
        // W1[A][c]
        std::vector<T> w1(nA_ * (2 * l3 + 1), T(0));
        std::vector<double> w1a(w1.size(), 0.0);
        for (int b = 0; b <= l3; ++b) {
            T f = binom<T>(l3, b) * ipow(q_ / r_[2], 2 * b);
            for (int c = 0; c <= 2 * b; ++c) {
                T t = f * binom<T>(2 * b, c);
                if ((b + c) % 2) t = -t;
                w1[(2 * b - c) * (2 * l3 + 1) + c] += t;
                w1a[(2 * b - c) * (2 * l3 + 1) + c] += mag(t);
            }
        }
        // W2[D][g]
        const int nD = 2 * l2 + 1;
        std::vector<T> w2(nD * nD, T(0));
        std::vector<double> w2a(w2.size(), 0.0);
        for (int d = 0; d <= l2; ++d) {
            T f = binom<T>(l2, d) * ipow(q_ / r_[1], 2 * d);
            for (int g = 0; g <= 2 * d; ++g) {
                T t = f * binom<T>(2 * d, g);
                if ((d + g) % 2) t = -t;
                w2[(2 * d - g) * nD + g] += t;
                w2a[(2 * d - g) * nD + g] += mag(t);
            }
        }
        const int nM = 2 * l1 + 1;
        for (int s2 : {1, -1})
            for (int s3 : {1, -1}) {
                Line<T> ln;
                ln.s2 = s2;
                ln.s3 = s3;
                T y3 = -s3 * r_[2] / q_;
                T yb = (-s2 * r_[1] - s3 * r_[2]) / q_;
                std::vector<T> py3(2 * std::max({l1, l2, l3}) + 2), pyb(py3.size());
                py3[0] = pyb[0] = T(1);
                for (size_t k = 1; k < py3.size(); ++k) {
                    py3[k] = py3[k - 1] * y3;
                    pyb[k] = pyb[k - 1] * yb;
                }
                // X1[A][e1], e1 = c - h
                const int ne1 = 2 * l3 + 1;
                std::vector<T> x1(nA_ * ne1, T(0));
                std::vector<double> x1a(x1.size(), 0.0);
                for (int A = 0; A < nA_; ++A)
                    for (int c = 0; c <= 2 * l3; ++c) {
                        const T& w = w1[A * (2 * l3 + 1) + c];
                        double wa = w1a[A * (2 * l3 + 1) + c];
                        if (wa == 0) continue;
                        for (int h = 0; h <= c; ++h) {
                            T t = w * binom<T>(c, h) * py3[h];
                            x1[A * ne1 + c - h] += t;
                            x1a[A * ne1 + c - h] += wa * mag(binom<T>(c, h) * py3[h]);
                        }
                    }
                // X2[D][e2], e2 = g - u - v
                const int ne2 = 2 * l2 + 1;
                std::vector<T> x2(nD * ne2, T(0));
                std::vector<double> x2a(x2.size(), 0.0);
                for (int D = 0; D < nD; ++D)
                    for (int g = 0; g < nD; ++g) {
                        const T& w = w2[D * nD + g];
                        double wa = w2a[D * nD + g];
                        if (wa == 0) continue;
                        for (int u = 0; u <= g; ++u)
                            for (int v = 0; v <= g - u; ++v) {
                                T f = binom<T>(g, u) * binom<T>(g - u, v) * py3[u] * pyb[v];
                                if (u % 2) f = -f;
                                x2[D * ne2 + g - u - v] += w * f;
                                x2a[D * ne2 + g - u - v] += wa * mag(f);
                            }
                    }
                // W3[M], M = 2m - t
                std::vector<T> w3(nM, T(0));
                std::vector<double> w3a(nM, 0.0);
                for (int m = 0; m <= l1; ++m) {
                    T f = binom<T>(l1, m) * ipow(q_ / r_[0], 2 * m);
                    if (m % 2) f = -f;
                    for (int t = 0; t <= 2 * m; ++t) {
                        T tt = f * binom<T>(2 * m, t) * pyb[t];
                        w3[2 * m - t] += tt;
                        w3a[2 * m - t] += mag(tt);
                    }
                }
                // combine
                std::vector<T> v1(nA_ * nE_ * ne2, T(0));
                std::vector<double> v1a(v1.size(), 0.0);
                for (int A = 0; A < nA_; ++A)
                    for (int e1 = 0; e1 < ne1; ++e1) {
                        if (x1a[A * ne1 + e1] == 0) continue;
                        for (int D = 0; D < nD; ++D)
                            for (int e2 = 0; e2 < ne2; ++e2) {
                                if (x2a[D * ne2 + e2] == 0) continue;
                                size_t k = (static_cast<size_t>(A) * nE_ + e1 + D) * ne2 + e2;
                                v1[k] += x1[A * ne1 + e1] * x2[D * ne2 + e2];
                                v1a[k] += x1a[A * ne1 + e1] * x2a[D * ne2 + e2];
                            }
                    }
                ln.w.assign(static_cast<size_t>(nA_) * nE_ * nH_, T(0));
                ln.wabs.assign(ln.w.size(), 0.0);
                for (int A = 0; A < nA_; ++A)
                    for (int E = 0; E < nE_; ++E)
                        for (int e2 = 0; e2 < ne2; ++e2) {
                            size_t k = (static_cast<size_t>(A) * nE_ + E) * ne2 + e2;
                            if (v1a[k] == 0) continue;
                            for (int M = 0; M < nM; ++M) {
                                if (w3a[M] == 0) continue;
                                ln.w[idx(A, E, e2 + M)] += v1[k] * w3[M];
                                ln.wabs[idx(A, E, e2 + M)] += v1a[k] * w3a[M];
                            }
                        }
                lines_.push_back(std::move(ln));
            }
    }

    OrderTriple ell_;
    int n_, L_, N_, nA_, nE_, nH_;
    std::array<T, 3> r_;
    T p_, q_;
    std::vector<Line<T>> lines_;
    std::vector<UKernel<T>> kern_;
};

void check_hb_spec(const WeightedIntegralSpec& spec, const HBLimits& limits) {
    validate(spec);
    if (spec.damping.kind != DampingKind::gaussian)
        fail(ErrorKind::domain, "the hankel-bowman method needs Gaussian damping");
    for (int l : spec.ell)
        if (l > limits.max_order)
            fail(ErrorKind::cost_limit, "order " + std::to_string(l) + " above the hankel-bowman cap " +
                                            std::to_string(limits.max_order));
    if (spec.n > limits.max_power)
        fail(ErrorKind::cost_limit,
             "power n = " + std::to_string(spec.n) + " above the hankel-bowman cap " + std::to_string(limits.max_power));
}

struct Accum {
    double re = 0, im = 0, err_re = 0, err_im = 0;
};

// Runs fn<T>() -> Accum over the tiers; accepts when the real part meets the
// tolerance and the imaginary rounding stays well inside the reality bound.
template <class Fn> Tier run_hb_tiers(const PrecisionPolicy& policy, EvalResult& res, Fn&& fn) {
    double needed = 0;
    return detail::run_tiers(policy, [&]<class T>(std::type_identity<T> tag, bool last) {
        if (!last && needed > 0 && unit_roundoff<T>() > needed) {
            ++res.diag.escalations;
            return false;
        }
        Accum a = fn(tag);
        double bound = std::max(1e-10, 1e-8 * std::fabs(a.re));
        bool ok = detail::accurate_enough(a.re, a.err_re, policy.tolerance) && a.err_im <= 0.1 * bound;
        if (!ok && !last) {
            double want = policy.tolerance * std::fabs(a.re);
            if (a.err_re > 0 && want > 0) needed = unit_roundoff<T>() * want / a.err_re;
            ++res.diag.escalations;
            return false;
        }
        res.value = a.re;
        res.im_residual = a.im;
        res.error_estimate = a.err_re;
        res.diag.quality_ok = ok;
        return true;
    });
}

void finish_hb(EvalResult& res) {
    if (std::fabs(res.im_residual) > std::max(1e-10, 1e-8 * std::fabs(res.value))) {
        res.diag.quality_ok = false;
        res.diag.notes.push_back("imaginary residual above the hankel-bowman reality bound");
    }
}

// doubled exponents of one summand
struct Doubled {
    int alpha, two_beta, two_eps, two_eta, two_kappa, two_lambda, two_rho;
};

Doubled doubled(const HBIndexState& s, const OrderTriple& ell, int n) {
    const int L = ell[0] + ell[1] + ell[2];
    Doubled d;
    d.alpha = n + L - s.zeta;
    d.two_beta = s.zeta + 2 * s.b - s.c - 1;
    d.two_eps = s.c + 2 * s.d - s.g - s.h - 1;
    d.two_eta = s.g + 2 * s.m - s.t - s.u - s.v - 1;
    d.two_kappa = n + L + 2 * s.b - s.c;
    d.two_lambda = d.two_kappa + 2 + d.two_eps;
    d.two_rho = d.two_lambda + 2 + d.two_eta;
    return d;
}

template <class T> struct CoefT {
    cplx<T> omega, psi;
};

template <class T> CoefT<T> coefficients_t(const HBIndexState& s, const Doubled& d) {
    // (-1)^(-beta) = i^(-2 beta) on the principal branch
    cplx<T> omega = i_pow<T>(-d.two_beta) * i_pow<T>(s.zeta + 1) * (detail::half_gamma<T>(d.alpha + 1) * 2 /
                                                                     T(d.two_eps + 2));
    T den = T(d.alpha + 1) * T(d.two_kappa + 2) * T(d.two_lambda + 2) * T(d.two_rho + 2) / 8;
    cplx<T> psi = minus_i_pow<T>(d.alpha + 1 + 2 * s.b - s.c) * (T(2) / den);
    return {omega, psi};
}

}  // namespace

HBExponents hb_exponents(const HBIndexState& s, const OrderTriple& ell, int n) {
    const int L = ell[0] + ell[1] + ell[2];
    const int l1 = ell[0], l2 = ell[1], l3 = ell[2];
    bool in_range = s.zeta >= 0 && s.zeta <= n + L && s.b >= 0 && s.b <= l3 && s.c >= 0 && s.c <= 2 * s.b &&
                    s.d >= 0 && s.d <= l2 && s.g >= 0 && s.g <= 2 * s.d && s.h >= 0 && s.h <= s.c && s.m >= 0 &&
                    s.m <= l1 && s.t >= 0 && s.t <= 2 * s.m && s.u >= 0 && s.u <= s.g && s.v >= 0 &&
                    s.v <= s.g - s.u;
    if (!in_range) fail(ErrorKind::domain, "hankel-bowman index outside its range");
    Doubled d = doubled(s, ell, n);
    HBExponents e;
    e.L = L;
    e.alpha = d.alpha;
    e.beta = d.two_beta / 2.0;
    e.epsilon = d.two_eps / 2.0;
    e.eta = d.two_eta / 2.0;
    e.kappa = d.two_kappa / 2.0;
    e.lambda = d.two_lambda / 2.0;
    e.rho = d.two_rho / 2.0;
    e.phi = e.eta;
    e.Omega = s.b + s.c + s.d + s.g + s.m - s.u;
    e.sigma = 2 * s.b + 2 * s.d + 2 * s.m - s.h - s.t - s.u - s.v;
    e.tau = n + L + s.c + 2 * s.d + 2 * s.m - s.h - s.t - s.u - s.v;
    if (!(e.epsilon + 1 > 0 && e.eta + 1 > 0 && e.kappa + 1 > 0 && e.lambda + 1 > 0 && e.rho + 1 > 0))
        fail(ErrorKind::domain, "hankel-bowman denominator not positive");
    return e;
}

HBCoefficients hb_coefficients(const HBIndexState& s, const OrderTriple& ell, int n) {
    hb_exponents(s, ell, n);
    Doubled d = doubled(s, ell, n);
    auto c = coefficients_t<double>(s, d);
    return {{c.omega.re, c.omega.im}, {c.psi.re, c.psi.im}};
}

ZYTerms z_y_terms(const HBIndexState& s, const OrderTriple& ell, int n, double rs, double p) {
    hb_exponents(s, ell, n);
    if (!(p != 0) || !std::isfinite(p)) fail(ErrorKind::domain, "damping parameter p must be finite and p != 0");
    Doubled d = doubled(s, ell, n);
    using T = mp50;
    T u = T(rs) / (2 * abs(T(p)));
    int two_max = d.two_beta + d.two_eps + d.two_eta + 6;
    UKernel<T> k(u, two_max, 2, 3, d.two_eps + d.two_eta + 4, PrecisionPolicy{}.max_terms);
    T z1 = k.spow(d.two_eps + d.two_eta + 4) * k.gc(d.two_beta + 2);
    T z2 = k.gc(d.two_beta + d.two_eps + d.two_eta + 6);
    T y1 = k.spow(d.two_eta + 2) * k.gc(d.two_beta + d.two_eps + 4);
    T y2 = k.gc(d.two_beta + d.two_eps + d.two_eta + 6);
    ZYTerms out;
    out.Z = to_double(T((z1 - z2) * 2 / (d.two_eta + d.two_eps + 4)));
    out.Y = to_double(T((y1 - y2) * 2 / (d.two_eta + 2)));
    return out;
}

namespace {

std::complex<double> q_integral(const WeightedIntegralSpec& spec, int zeta, bool hyper, const PrecisionPolicy& policy) {
    check_hb_spec(spec, HBLimits{});
    const int N = spec.n + spec.ell[0] + spec.ell[1] + spec.ell[2];
    if (zeta < 0 || zeta > N) fail(ErrorKind::domain, "zeta outside [0, n + L]");
    EvalResult res;
    std::complex<double> out;
    run_hb_tiers(policy, res, [&]<class T>(std::type_identity<T>) {
        HBEngine<T> eng(spec, policy.max_terms);
        KVal<T> k = hyper ? eng.hg_sum(zeta) : eng.pl_sum(zeta);
        T f = eng.volume_factor() * ipow(2 * eng.p(), zeta);
        cplx<T> ph = hyper ? minus_i_pow<T>(N - zeta + 1) : cplx<T>(T(-1));
        cplx<T> v = ph * (f * k.v);
        double err = detail::rounding_error<T>(mag(f) * k.s);
        out = {to_double(v.re), to_double(v.im)};
        Accum a;
        // the phase is a pure power of i, so one component carries everything
        a.re = std::max(std::fabs(out.real()), std::fabs(out.imag()));
        a.err_re = err;
        return a;
    });
    return out;
}

}  // namespace

std::complex<double> i_pl(const WeightedIntegralSpec& spec, int zeta, const PrecisionPolicy& policy) {
    return q_integral(spec, zeta, false, policy);
}

std::complex<double> i_hg(const WeightedIntegralSpec& spec, int zeta, const PrecisionPolicy& policy) {
    return q_integral(spec, zeta, true, policy);
}

EvalResult evaluate_hb(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy, const HBLimits& limits) {
    check_hb_spec(spec, limits);
    validate(policy);
    EvalResult res;
    res.method = "hankel-bowman";
    res.diag.tier = run_hb_tiers(policy, res, [&]<class T>(std::type_identity<T>) {
        HBEngine<T> eng(spec, policy.max_terms);
        const int N = eng.N();
        T re, im;
        double sre, sim;
        eng.total(re, im, sre, sim);
        T f = -eng.prefactor() * ipow(eng.p(), -(N + 1));
        res.diag.kernel_calls += eng.kernel_calls();
        Accum a;
        a.re = to_double(T(f * re));
        a.im = to_double(T(f * im));
        a.err_re = detail::rounding_error<T>(mag(f) * sre);
        a.err_im = detail::rounding_error<T>(mag(f) * sim);
        return a;
    });
    finish_hb(res);
    return res;
}

EvalResult evaluate_hb_direct(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy,
                              const HBLimits& limits) {
    check_hb_spec(spec, limits);
    validate(policy);
    const int l1 = spec.ell[0], l2 = spec.ell[1], l3 = spec.ell[2];
    const int n = spec.n;
    EvalResult res;
    res.method = "hankel-bowman-direct";
    res.diag.tier = run_hb_tiers(policy, res, [&]<class T>(std::type_identity<T>) {
        HBEngine<T> eng(spec, policy.max_terms);
        const int N = eng.N();
        const auto& r = eng.r();
        const T q = 2 * eng.p();
        cplx<T> acc;
        double sre = 0, sim = 0;
        HBIndexState s;
        for (s.zeta = 0; s.zeta <= N; ++s.zeta)
            for (s.b = 0; s.b <= l3; ++s.b)
                for (s.c = 0; s.c <= 2 * s.b; ++s.c)
                    for (s.d = 0; s.d <= l2; ++s.d)
                        for (s.g = 0; s.g <= 2 * s.d; ++s.g)
                            for (s.h = 0; s.h <= s.c; ++s.h)
                                for (s.m = 0; s.m <= l1; ++s.m)
                                    for (s.t = 0; s.t <= 2 * s.m; ++s.t)
                                        for (s.u = 0; s.u <= s.g; ++s.u)
                                            for (s.v = 0; s.v <= s.g - s.u; ++s.v) {
                                                HBExponents e = hb_exponents(s, spec.ell, n);
                                                Doubled d = doubled(s, spec.ell, n);
                                                CoefT<T> co = coefficients_t<T>(s, d);
                                                T coef = binom<T>(l3, s.b) * binom<T>(2 * s.b, s.c) *
                                                         binom<T>(l2, s.d) * binom<T>(2 * s.d, s.g) *
                                                         binom<T>(s.c, s.h) * binom<T>(l1, s.m) *
                                                         binom<T>(2 * s.m, s.t) * binom<T>(s.g, s.u) *
                                                         binom<T>(s.g - s.u, s.v) * ipow(q, e.sigma) *
                                                         ipow(r[2], s.h + s.u - 2 * s.b) * ipow(r[1], -2 * s.d) *
                                                         ipow(r[0], -2 * s.m);
                                                if (e.Omega % 2) coef = -coef;
                                                // raw F = u^(2 rho+2) 4F4(...) from the normalised kernel
                                                T fscale = T(d.alpha + 1) * T(d.two_kappa + 2) *
                                                           T(d.two_lambda + 2) * T(d.two_rho + 2) / 16;
                                                cplx<T> inner;
                                                double iscale = 0;
                                                for (const auto& ln : eng.lines()) {
                                                    T base = -ln.s2 * r[1] - ln.s3 * r[2];
                                                    T lf = ipow(base, s.t + s.v);
                                                    if (ln.s2 * ln.s3 < 0) lf = -lf;
                                                    if ((s.h + s.u) % 2 && ln.s3 > 0) lf = -lf;
                                                    auto& kp = eng.kernel(ln.iu_plus);
                                                    auto& km = eng.kernel(ln.iu_minus);
                                                    auto zp = kp.zy(d.two_beta, d.two_eps, d.two_eta);
                                                    auto zm = km.zy(d.two_beta, d.two_eps, d.two_eta);
                                                    auto hp = kp.hg(d.alpha, d.two_kappa, d.two_eps + 1,
                                                                    d.two_eta + 1);
                                                    auto hm = km.hg(d.alpha, d.two_kappa, d.two_eps + 1,
                                                                    d.two_eta + 1);
                                                    T dF = (hp.v - hm.v) * fscale, dZY = zp.v - zm.v;
                                                    inner += (co.psi * dF - co.omega * dZY) * lf;
                                                    iscale += mag(lf) * (mag(co.psi) * mag(fscale) * (hp.s + hm.s) +
                                                                         mag(co.omega) * (zp.s + zm.s));
                                                }
                                                cplx<T> ph = i_pow<T>(s.zeta + 2 * s.b - s.c) *
                                                             (binom<T>(N, s.zeta) * coef);
                                                cplx<T> term = ph * inner;
                                                acc += term;
                                                double ts = mag(binom<T>(N, s.zeta) * coef) * iscale;
                                                sre += ts;
                                                sim += ts;
                                            }
        T f = -eng.prefactor() * ipow(eng.p(), -(N + 1));
        res.diag.kernel_calls += eng.kernel_calls();
        Accum a;
        a.re = to_double(T(f * acc.re));
        a.im = to_double(T(f * acc.im));
        a.err_re = detail::rounding_error<T>(mag(f) * sre);
        a.err_im = detail::rounding_error<T>(mag(f) * sim);
        return a;
    });
    finish_hb(res);
    return res;
}

}  // namespace trisbf
