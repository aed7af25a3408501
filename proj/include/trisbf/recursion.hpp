#pragma once

#include <array>
#include <vector>

#include "trisbf/types.hpp"

namespace trisbf {

inline constexpr int default_max_order = 20;

struct Canonical {
    OrderTriple ell;
    RadiiTriple r;
    std::array<int, 3> perm;  // ell[i] = input.ell[perm[i]]
};

// Orders descending; equal orders ordered by radius ascending.
Canonical canonicalize(const OrderTriple& ell, const RadiiTriple& r);

// One node of the reduction DAG. Radii are referenced through slot indices
// into the canonical radii triple, so a plan depends on the orders only.
struct PlanNode {
    OrderTriple ell{0, 0, 0};
    std::array<int, 3> slots{0, 1, 2};
    bool leaf = false;
    // leaf data: base case at order leaf_ell with radii taken from leaf_slots
    BaseCaseVariant variant = BaseCaseVariant::L00;
    int leaf_ell = 0;
    std::array<int, 3> leaf_slots{0, 1, 2};
    // interior data: value = (r[slots[0]] / r[slots[1]]) * (num / den) * (A + B) - C
    std::array<int, 3> src{-1, -1, -1};
    int num = 0, den = 1;
};

struct BaseCaseKey {
    int ell;
    BaseCaseVariant variant;
    std::array<int, 3> slots;
};

struct ReductionPlan {
    std::vector<PlanNode> nodes;  // sources precede their targets; the last node is the target
    int max_leaf_ell = 0;

    int target() const { return static_cast<int>(nodes.size()) - 1; }
    int leaf_count() const;
    std::vector<BaseCaseKey> leaves() const;
};

// Plan for canonical orders (each in [0, max_order]).
ReductionPlan reduction_plan(const OrderTriple& canonical_orders, int max_order = default_max_order);

struct RecursionTrace {
    Canonical canonical;
    ReductionPlan plan;
    std::vector<double> node_values;  // per plan node, rounded to double
    double max_relative_residual = 0;
};

// Relative residual of the three-term relation at every interior node.
double max_recursion_residual(const ReductionPlan& plan, const RadiiTriple& canonical_r,
                              const std::vector<double>& node_values);

// Weight k^2 (spec.n must be 2); exponential or Gaussian leaves.
EvalResult evaluate(const WeightedIntegralSpec& spec, const PrecisionPolicy& policy = {},
                    RecursionTrace* trace = nullptr, int max_order = default_max_order);

}  // namespace trisbf
