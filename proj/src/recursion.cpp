#include "trisbf/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "trisbf/detail/recursion_impl.hpp"
#include "trisbf/detail/tiers.hpp"
#include "trisbf/expdamp.hpp"

namespace trisbf {

Canonical canonicalize(const OrderTriple& ell, const RadiiTriple& r) {
    Canonical c;
    std::iota(c.perm.begin(), c.perm.end(), 0);
    std::stable_sort(c.perm.begin(), c.perm.end(), [&](int a, int b) {
        if (ell[a] != ell[b]) return ell[a] > ell[b];
        return r[a] < r[b];
    });
    for (int i = 0; i < 3; ++i) {
        c.ell[i] = ell[c.perm[i]];
        c.r[i] = r[c.perm[i]];
    }
    return c;
}

int ReductionPlan::leaf_count() const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const PlanNode& n) { return n.leaf; }));
}

std::vector<BaseCaseKey> ReductionPlan::leaves() const {
    std::vector<BaseCaseKey> out;
    for (const PlanNode& n : nodes)
        if (n.leaf) out.push_back({n.leaf_ell, n.variant, n.leaf_slots});
    return out;
}

namespace {

struct PlanBuilder {
    ReductionPlan plan;
    std::map<std::pair<OrderTriple, std::array<int, 3>>, int> memo;
    std::map<std::tuple<int, int, std::array<int, 3>>, int> leaf_memo;

    int build(OrderTriple ell, std::array<int, 3> slots) {
        // node-level canonical form: orders descending, ties by slot index
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (ell[a] != ell[b]) return ell[a] > ell[b];
            return slots[a] < slots[b];
        });
        OrderTriple e{ell[idx[0]], ell[idx[1]], ell[idx[2]]};
        std::array<int, 3> s{slots[idx[0]], slots[idx[1]], slots[idx[2]]};
        auto key = std::make_pair(e, s);
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        PlanNode node;
        node.ell = e;
        node.slots = s;
        const int a = e[0], b = e[1], c = e[2];
        if (b <= 0) {
            node.leaf = true;
            node.leaf_ell = a;
            if (b == 0 && c == 0) {
                node.variant = BaseCaseVariant::L00;
                node.leaf_slots = {s[0], std::min(s[1], s[2]), std::max(s[1], s[2])};
            } else if (b == 0) {
                node.variant = BaseCaseVariant::Lm10;  // the order -1 radius goes to slot 2
                node.leaf_slots = {s[0], s[2], s[1]};
            } else {
                node.variant = BaseCaseVariant::Lm1m1;
                node.leaf_slots = {s[0], std::min(s[1], s[2]), std::max(s[1], s[2])};
            }
            auto lkey = std::make_tuple(node.leaf_ell, static_cast<int>(node.variant), node.leaf_slots);
            if (auto it = leaf_memo.find(lkey); it != leaf_memo.end()) {
                memo[key] = it->second;
                return it->second;
            }
            plan.max_leaf_ell = std::max(plan.max_leaf_ell, a);
            plan.nodes.push_back(node);
            int id = plan.target();
            leaf_memo[lkey] = id;
            memo[key] = id;
            return id;
        }
        // f(a,b,c) = (r_a/r_b) (2b-1)/(2a+1) [f(a-1,b-1,c) + f(a+1,b-1,c)] - f(a,b-2,c)
        int A = build({a - 1, b - 1, c}, s);
        int B = build({a + 1, b - 1, c}, s);
        int C = build({a, b - 2, c}, s);
        node.src = {A, B, C};
        node.num = 2 * b - 1;
        node.den = 2 * a + 1;
        plan.nodes.push_back(node);
        int id = plan.target();
        memo[key] = id;
        return id;
    }
};

}  // namespace

ReductionPlan reduction_plan(const OrderTriple& orders, int max_order) {
    for (int l : orders) {
        if (l < 0) fail(ErrorKind::domain, "orders must be non-negative");
        if (l > max_order)
            fail(ErrorKind::order_limit, "order " + std::to_string(l) + " exceeds limit " + std::to_string(max_order));
    }
    if (!(orders[0] >= orders[1] && orders[1] >= orders[2]))
        fail(ErrorKind::domain, "reduction_plan expects canonical (descending) orders");
    PlanBuilder b;
    int top = b.build(orders, {0, 1, 2});
    // a target that is itself a base case is the only node
    if (top != b.plan.target()) fail(ErrorKind::domain, "internal: plan target is not the last node");
    return b.plan;
}

double max_recursion_residual(const ReductionPlan& plan, const RadiiTriple& r, const std::vector<double>& v) {
    double worst = 0;
    for (size_t i = 0; i < plan.nodes.size(); ++i) {
        const PlanNode& n = plan.nodes[i];
        if (n.leaf) continue;
        double coef = r[n.slots[0]] / r[n.slots[1]] * n.num / n.den;
        double ta = coef * v[n.src[0]], tb = coef * v[n.src[1]], tc = v[n.src[2]];
        double res = v[i] - ta - tb + tc;
        double scale = std::max({std::fabs(v[i]), std::fabs(ta), std::fabs(tb), std::fabs(tc)});
        if (scale > 0) worst = std::max(worst, std::fabs(res) / scale);
    }
    return worst;
}

EvalResult evaluate(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy, RecursionTrace* trace,
                    int max_order) {
    validate(spec);
    validate(policy);
    if (spec.n != 2)
        fail(ErrorKind::unsupported_power, "the recursion route evaluates weight k^2 only (n = 2); got n = " +
                                               std::to_string(spec.n));
    Canonical canon = canonicalize(spec.ell, spec.r);
    ReductionPlan plan = reduction_plan(canon.ell, max_order);
    const double p = std::fabs(spec.damping.p);
    const bool is_exp = spec.damping.kind == DampingKind::exponential;

    EvalResult res;
    res.method = "recursion";
    std::vector<double> node_values;
    res.diag.tier = detail::run_tiers(policy, [&]<class T>(std::type_identity<T>, bool last) {
        detail::PlanValues<T> pv;
        if (is_exp) {
            detail::ExpKernelStore<T> ks(p, plan.max_leaf_ell, policy.max_terms);
            pv = detail::run_plan<T>(plan, canon.r, [&](int l, BaseCaseVariant v, const detail::LeafRadii& lr) {
                return detail::exp_leaf<T>(l, v, lr, ks);
            });
            res.diag.kernel_calls += ks.calls;
        } else {
            detail::GaussKernelStore<T> ks(p, plan.max_leaf_ell, policy.max_terms);
            pv = detail::run_plan<T>(plan, canon.r, [&](int l, BaseCaseVariant v, const detail::LeafRadii& lr) {
                return detail::gauss_leaf<T>(l, v, lr, ks);
            });
            res.diag.kernel_calls += ks.calls;
        }
        double v = to_double(pv.re.back());
        double err = detail::rounding_error<T>(pv.scale.back());
        bool ok = detail::accurate_enough(v, err, policy.tolerance);
        if (!ok && !last) {
            ++res.diag.escalations;
            return false;
        }
        res.value = v;
        res.im_residual = to_double(pv.im.back());
        res.error_estimate = err;
        res.diag.quality_ok = ok;
        if (trace) {
            node_values.resize(pv.re.size());
            for (size_t i = 0; i < pv.re.size(); ++i) node_values[i] = to_double(pv.re[i]);
        }
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
    if (trace) {
        trace->canonical = canon;
        trace->plan = plan;
        trace->node_values = node_values;
        trace->max_relative_residual = max_recursion_residual(plan, canon.r, node_values);
    }
    return res;
}

}  // namespace trisbf
