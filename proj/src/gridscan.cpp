#include "trisbf/gridscan.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>

#include "trisbf/detail/recursion_impl.hpp"
#include "trisbf/detail/tiers.hpp"
#include "trisbf/error.hpp"
#include "trisbf/expdamp.hpp"
#include "trisbf/oracle.hpp"

namespace trisbf {

double AxisGrid::at(int i) const {
    if (count <= 1) return start;
    return start + (stop - start) * i / (count - 1);
}

RadiiTriple GridSpec::radii(int flat) const {
    int k = flat % axes[2].count;
    int rest = flat / axes[2].count;
    int j = rest % axes[1].count;
    int i = rest / axes[1].count;
    return {axes[0].at(i), axes[1].at(j), axes[2].at(k)};
}

void validate(const GridSpec& grid) {
    for (const AxisGrid& a : grid.axes) {
        if (a.count < 1) fail(ErrorKind::domain, "grid axis counts must be >= 1");
        if (!(a.start > 0) || !(a.stop > 0) || !std::isfinite(a.start) || !std::isfinite(a.stop))
            fail(ErrorKind::domain, "grid radii must be positive and finite");
    }
    WeightedIntegralSpec s;
    s.ell = grid.ell;
    s.r = grid.radii(0);
    s.damping = grid.damping;
    s.n = grid.n;
    validate(s);
}

ArgumentTable collect_arguments(const GridSpec& grid) {
    validate(grid);
    ArgumentTable t;
    t.kind = grid.damping.kind;
    const int npts = grid.size();
    const bool is_exp = t.kind == DampingKind::exponential;
    std::vector<quad> keys;
    std::vector<std::pair<int, int>> where;  // (point, combo) per key
    keys.reserve(npts * (is_exp ? 4 : 8));
    for (int pt = 0; pt < npts; ++pt) {
        RadiiTriple r = grid.radii(pt);
        quad r1(r[0]), r2(r[1]), r3(r[2]);
        if (is_exp) {
            int combo = 0;
            for (int s2 : {-1, 1})
                for (int s3 : {-1, 1}) {
                    keys.push_back(s2 * r2 + s3 * r3);
                    where.emplace_back(pt, combo++);
                }
        } else {
            int combo = 0;
            for (int s2 : {1, -1})
                for (int s3 : {1, -1})
                    for (int s1 : {1, -1}) {
                        keys.push_back(s1 * r1 + s2 * r2 + s3 * r3);
                        where.emplace_back(pt, combo++);
                    }
        }
    }
    std::vector<quad> uniq = keys;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const double p2 = grid.damping.p * grid.damping.p;
    for (const quad& q : uniq) {
        if (is_exp)
            t.complex_values.emplace_back(static_cast<double>(q), -p2);
        else
            t.real_values.push_back(static_cast<double>(q));
    }
    t.refs.reserve(keys.size());
    for (size_t i = 0; i < keys.size(); ++i) {
        int idx = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), keys[i]) - uniq.begin());
        t.refs.push_back({where[i].first, where[i].second, idx});
    }
    return t;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int block = (count + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t * block; i < std::min(count, (t + 1) * block); ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int default_thread_count() {
    const char* env = std::getenv("TRISBF_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024)
        fail(ErrorKind::usage, std::string("TRISBF_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<int>(v);
}

namespace {

struct Prepared {
    ReductionPlan plan;
    std::vector<RadiiTriple> canon_r;
};

Prepared prepare(const GridSpec& grid, const GridOptions& options) {
    validate(grid);
    validate(options.policy);
    if (grid.n != 2)
        fail(ErrorKind::unsupported_power, "grid evaluation runs the recursion route (n = 2); got n = " +
                                               std::to_string(grid.n));
    Prepared pr;
    const int npts = grid.size();
    pr.canon_r.resize(npts);
    OrderTriple ordered{};
    for (int i = 0; i < npts; ++i) {
        Canonical c = canonicalize(grid.ell, grid.radii(i));
        pr.canon_r[i] = c.r;
        ordered = c.ell;
    }
    pr.plan = reduction_plan(ordered, options.max_order);
    return pr;
}

detail::LeafRadii leaf_radii(const PlanNode& node, const RadiiTriple& r) {
    return {r[node.leaf_slots[0]], r[node.leaf_slots[1]], r[node.leaf_slots[2]]};
}

template <class T, class Store> void insert_keys(Store& ks, const Prepared& pr, const std::vector<int>& pts) {
    for (int i : pts)
        for (const PlanNode& node : pr.plan.nodes) {
            if (!node.leaf) continue;
            auto lr = leaf_radii(node, pr.canon_r[i]);
            if constexpr (std::is_same_v<Store, detail::ExpKernelStore<T>>) {
                for (const auto& k : detail::exp_leaf_keys(lr)) ks.insert(k);
            } else {
                for (const auto& k : detail::gauss_leaf_keys(lr)) ks.insert(k);
            }
        }
}

template <class T, class Store> detail::PlanValues<T> run_point(const Prepared& pr, int i, Store& ks) {
    return detail::run_plan<T>(pr.plan, pr.canon_r[i], [&](int l, BaseCaseVariant v, const detail::LeafRadii& lr) {
        if constexpr (std::is_same_v<Store, detail::ExpKernelStore<T>>)
            return detail::exp_leaf<T>(l, v, lr, ks);
        else
            return detail::gauss_leaf<T>(l, v, lr, ks);
    });
}

GridResult empty_result(const GridSpec& grid) {
    GridResult res;
    res.shape = grid.shape();
    const int npts = grid.size();
    res.values.assign(npts, 0.0);
    res.im_residual.assign(npts, 0.0);
    res.tiers.assign(npts, Tier::binary64);
    return res;
}

void finish(GridResult& res, const std::vector<char>& ok, Tier lowest) {
    for (size_t i = 0; i < res.values.size(); ++i) {
        ++res.diag.points_per_tier[static_cast<int>(res.tiers[i])];
        if (res.tiers[i] != lowest) ++res.diag.escalated_points;
        if (!ok[i] || !reality_bound_ok(res.values[i], res.im_residual[i])) ++res.diag.quality_failures;
    }
}

GridResult exact_grid(const GridSpec& grid, const GridOptions& options, const Prepared& pr) {
    GridResult res = empty_result(grid);
    const int npts = grid.size();
    const double p = std::fabs(grid.damping.p);
    const bool is_exp = grid.damping.kind == DampingKind::exponential;
    const int lmax = pr.plan.max_leaf_ell;
    std::vector<char> quality(npts, 1);
    std::vector<int> pending(npts);
    for (int i = 0; i < npts; ++i) pending[i] = i;

    detail::run_tiers(options.policy, [&]<class T>(std::type_identity<T>, bool last) {
        if (pending.empty()) return true;
        auto fill = [&](auto& ks) {
            insert_keys<T>(ks, pr, pending);
            ks.frozen = true;
            res.diag.kernel_calls += ks.calls;
            res.diag.kernel_arguments += static_cast<int>(ks.table.size());
            std::vector<char> done(pending.size(), 0);
            parallel_for(static_cast<int>(pending.size()), options.threads, [&](int j) {
                const int i = pending[j];
                auto pv = run_point<T>(pr, i, ks);
                double v = to_double(pv.re.back());
                double err = detail::rounding_error<T>(pv.scale.back());
                bool ok = detail::accurate_enough(v, err, options.policy.tolerance);
                if (!ok && !last) return;
                res.values[i] = v;
                res.im_residual[i] = to_double(pv.im.back());
                res.tiers[i] = tier_of<T>::value;
                quality[i] = ok;
                done[j] = 1;
            });
            std::vector<int> next;
            for (size_t j = 0; j < pending.size(); ++j)
                if (!done[j]) next.push_back(pending[j]);
            pending.swap(next);
        };
        if (is_exp) {
            detail::ExpKernelStore<T> ks(p, lmax, options.policy.max_terms);
            fill(ks);
        } else {
            detail::GaussKernelStore<T> ks(p, lmax, options.policy.max_terms);
            fill(ks);
        }
        return pending.empty();
    });
    finish(res, quality, options.policy.lowest_tier);
    return res;
}

GridResult interpolated_grid(const GridSpec& grid, const GridOptions& options, const Prepared& pr) {
    using boost::math::interpolators::cardinal_cubic_b_spline;
    if (grid.damping.kind != DampingKind::gaussian)
        fail(ErrorKind::domain, "interpolated grid mode needs gaussian damping");
    if (options.interpolation_nodes < 8) fail(ErrorKind::domain, "interpolation needs at least 8 nodes");
    GridResult res = empty_result(grid);
    const int npts = grid.size();
    const double p = std::fabs(grid.damping.p);
    const int mmax = pr.plan.max_leaf_ell;
    const int policy_terms = options.policy.max_terms;

    std::vector<int> all(npts);
    for (int i = 0; i < npts; ++i) all[i] = i;
    detail::GaussKernelStore<double> exact_keys(p, mmax, policy_terms);
    insert_keys<double>(exact_keys, pr, all);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& kv : exact_keys.table) {
        lo = std::min(lo, static_cast<double>(kv.first));
        hi = std::max(hi, static_cast<double>(kv.first));
    }
    if (hi - lo < 1e-12) hi = lo + 1;  // single argument: any span works
    const int M = options.interpolation_nodes;
    const double h = (hi - lo) / (M - 1);

    // dense line of exact kernels
    detail::GaussKernelStore<double> line(p, mmax, policy_terms);
    std::vector<std::vector<double>> gv(mmax + 1, std::vector<double>(M)), cv(mmax + 1, std::vector<double>(M));
    for (int k = 0; k < M; ++k) {
        quad key(lo + k * h);
        line.insert(key);
        const auto& e = line.table.at(key);
        for (int m = 0; m <= mmax; ++m) {
            gv[m][k] = e.g[m];
            cv[m][k] = e.chi[m];
        }
    }
    res.diag.kernel_calls = line.calls;
    res.diag.kernel_arguments = M;
    std::vector<cardinal_cubic_b_spline<double>> gs, cs;
    for (int m = 0; m <= mmax; ++m) {
        gs.emplace_back(gv[m].begin(), gv[m].end(), lo, h);
        cs.emplace_back(cv[m].begin(), cv[m].end(), lo, h);
    }

    // store filled from the splines at every needed argument
    detail::GaussKernelStore<double> ks(p, mmax, policy_terms);
    for (const auto& kv : exact_keys.table) {
        double x = static_cast<double>(kv.first);
        detail::GaussKernelStore<double>::Entry e;
        e.g.resize(mmax + 1);
        e.chi.resize(mmax + 1);
        e.g_scale.resize(mmax + 1);
        e.chi_scale.resize(mmax + 1);
        for (int m = 0; m <= mmax; ++m) {
            e.g[m] = gs[m](x);
            e.chi[m] = cs[m](x);
            e.g_scale[m] = 4 * std::fabs(e.g[m]);
            e.chi_scale[m] = 4 * std::fabs(e.chi[m]);
        }
        ks.table.emplace(kv.first, std::move(e));
    }
    ks.frozen = true;
    std::vector<char> quality(npts, 1);
    parallel_for(npts, options.threads, [&](int i) {
        auto pv = run_point<double>(pr, i, ks);
        res.values[i] = pv.re.back();
        res.im_residual[i] = pv.im.back();
        res.tiers[i] = Tier::binary64;
    });
    GridResult exact = exact_grid(grid, options, pr);
    double worst = 0;
    for (int i = 0; i < npts; ++i) {
        double d = std::fabs(res.values[i] - exact.values[i]);
        double s = std::fabs(exact.values[i]);
        if (s > 0) worst = std::max(worst, d / s);
        quality[i] = d <= options.policy.tolerance * s;
    }
    res.diag.interpolation_max_rel_error = worst;
    finish(res, quality, Tier::binary64);
    return res;
}

}  // namespace

GridResult evaluate_grid(const GridSpec& grid, const GridOptions& options) {
    Prepared pr = prepare(grid, options);
    if (options.mode == GridMode::interpolated) return interpolated_grid(grid, options, pr);
    return exact_grid(grid, options, pr);
}

GridResult evaluate_pointwise(const GridSpec& grid, const GridOptions& options) {
    prepare(grid, options);  // same checks
    GridResult res = empty_result(grid);
    const int npts = grid.size();
    std::vector<std::int64_t> calls(npts, 0);
    std::vector<char> quality(npts, 1);
    parallel_for(npts, options.threads, [&](int i) {
        WeightedIntegralSpec s;
        s.ell = grid.ell;
        s.r = grid.radii(i);
        s.damping = grid.damping;
        s.n = grid.n;
        EvalResult e = evaluate(s, options.policy, nullptr, options.max_order);
        res.values[i] = e.value;
        res.im_residual[i] = e.im_residual;
        res.tiers[i] = e.diag.tier;
        calls[i] = e.diag.kernel_calls;
        quality[i] = e.diag.quality_ok;
    });
    for (auto c : calls) res.diag.kernel_calls += c;
    finish(res, quality, options.policy.lowest_tier);
    return res;
}

BenchmarkReport benchmark(const GridSpec& grid, int repetitions, const GridOptions& options, int oracle_samples,
                          double oracle_tol) {
    if (repetitions < 1) fail(ErrorKind::domain, "repetitions must be >= 1");
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    BenchmarkReport rep;
    rep.points = grid.size();
    rep.repetitions = repetitions;

    auto t0 = clock::now();
    for (int k = 0; k < repetitions; ++k) rep.grid_kernel_calls = evaluate_grid(grid, options).diag.kernel_calls;
    rep.grid_ms = ms_since(t0) / repetitions;

    t0 = clock::now();
    for (int k = 0; k < repetitions; ++k)
        rep.pointwise_kernel_calls = evaluate_pointwise(grid, options).diag.kernel_calls;
    rep.pointwise_ms = ms_since(t0) / repetitions;
    rep.speedup = rep.grid_ms > 0 ? rep.pointwise_ms / rep.grid_ms : 0;

    // oracle on evenly spaced sample points, scaled to the whole grid
    std::set<int> picks;
    const int S = std::max(1, std::min(oracle_samples, rep.points));
    for (int k = 0; k < S; ++k) picks.insert(static_cast<int>(static_cast<long long>(k) * rep.points / S));
    t0 = clock::now();
    for (int i : picks) {
        WeightedIntegralSpec s;
        s.ell = grid.ell;
        s.r = grid.radii(i);
        s.damping = grid.damping;
        s.n = grid.n;
        quadrature_eval(s, oracle_tol);
    }
    rep.oracle_sampled_points = static_cast<int>(picks.size());
    rep.oracle_ms = ms_since(t0) * rep.points / rep.oracle_sampled_points;
    return rep;
}

}  // namespace trisbf
