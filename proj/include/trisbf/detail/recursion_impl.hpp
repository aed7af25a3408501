#pragma once

#include <vector>

#include "trisbf/detail/kernels.hpp"
#include "trisbf/recursion.hpp"

namespace trisbf::detail {

template <class T> struct PlanValues {
    std::vector<T> re, im;
    std::vector<double> scale;
    int leaves = 0;
};

// leaf(ell, variant, radii) -> LeafValue<T>
template <class T, class LeafFn>
PlanValues<T> run_plan(const ReductionPlan& plan, const RadiiTriple& r, LeafFn&& leaf) {
    const int n = static_cast<int>(plan.nodes.size());
    PlanValues<T> out;
    out.re.resize(n);
    out.im.resize(n);
    out.scale.resize(n);
    for (int i = 0; i < n; ++i) {
        const PlanNode& node = plan.nodes[i];
        if (node.leaf) {
            LeafRadii lr{r[node.leaf_slots[0]], r[node.leaf_slots[1]], r[node.leaf_slots[2]]};
            LeafValue<T> lv = leaf(node.leaf_ell, node.variant, lr);
            out.re[i] = lv.re;
            out.im[i] = lv.im;
            out.scale[i] = lv.scale;
            ++out.leaves;
            continue;
        }
        const int a = node.src[0], b = node.src[1], c = node.src[2];
        T coef = T(r[node.slots[0]]) / T(r[node.slots[1]]) * T(node.num) / T(node.den);
        out.re[i] = coef * (out.re[a] + out.re[b]) - out.re[c];
        out.im[i] = coef * (out.im[a] + out.im[b]) - out.im[c];
        out.scale[i] = mag(coef) * (out.scale[a] + out.scale[b]) + out.scale[c] + mag(out.re[i]);
    }
    return out;
}

// sum over leaves of |d target / d leaf|, bounded by propagating magnitudes
inline double plan_amplification(const ReductionPlan& plan, const RadiiTriple& r) {
    std::vector<double> amp(plan.nodes.size());
    for (size_t i = 0; i < plan.nodes.size(); ++i) {
        const PlanNode& node = plan.nodes[i];
        if (node.leaf) {
            amp[i] = 1;
            continue;
        }
        double coef = std::fabs(r[node.slots[0]] / r[node.slots[1]] * node.num / node.den);
        amp[i] = coef * (amp[node.src[0]] + amp[node.src[1]]) + amp[node.src[2]];
    }
    return amp.back();
}

}  // namespace trisbf::detail
