#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "trisbf/recursion.hpp"
#include "trisbf/types.hpp"

namespace trisbf {

struct AxisGrid {
    double start = 1, stop = 1;
    int count = 1;

    double at(int i) const;  // start + (stop - start) i / (count - 1)
};

struct GridSpec {
    std::array<AxisGrid, 3> axes;
    OrderTriple ell{0, 0, 0};
    Damping damping;
    int n = 2;

    std::array<int, 3> shape() const { return {axes[0].count, axes[1].count, axes[2].count}; }
    int size() const { return axes[0].count * axes[1].count * axes[2].count; }
    // row-major, r1 outermost
    RadiiTriple radii(int flat) const;
};

// Throws domain for counts < 1 or non-positive radii anywhere on an axis.
void validate(const GridSpec& grid);

struct ArgumentRef {
    int point = 0;  // flat grid index
    int combo = 0;  // sign combination
    int index = 0;  // into the value list
};

// Exponential: complex s2 r2 + s3 r3 - i p^2, combos (--, -+, +-, ++).
// Gaussian: real s1 r1 + s2 r2 + s3 r3, combos s1 fastest then s3, s2 from +.
// Values are deduplicated on the exact sums of the radii.
struct ArgumentTable {
    DampingKind kind = DampingKind::gaussian;
    std::vector<std::complex<double>> complex_values;  // exponential, sorted by (re, im)
    std::vector<double> real_values;                   // gaussian, sorted
    std::vector<ArgumentRef> refs;

    std::size_t size() const { return kind == DampingKind::exponential ? complex_values.size() : real_values.size(); }
};

ArgumentTable collect_arguments(const GridSpec& grid);

enum class GridMode {
    exact,
    // gaussian only: kernels from cubic B-splines on a dense uniform line of
    // signed radius sums, in binary64; the deviation from exact mode is reported
    interpolated,
};

struct GridOptions {
    PrecisionPolicy policy;
    int threads = 1;
    GridMode mode = GridMode::exact;
    int interpolation_nodes = 2048;
    int max_order = default_max_order;
};

struct GridDiagnostics {
    std::int64_t kernel_calls = 0;
    int kernel_arguments = 0;  // distinct kernel keys over all tiers
    int escalated_points = 0;  // points that needed more than the lowest tier
    int quality_failures = 0;
    std::array<int, tier_count> points_per_tier{};
    double interpolation_max_rel_error = 0;  // interpolated mode only
};

struct GridResult {
    std::array<int, 3> shape{};
    std::vector<double> values;  // row-major, r1 outermost
    std::vector<double> im_residual;
    std::vector<Tier> tiers;
    GridDiagnostics diag;
};

// Orders within the recursion caps, n = 2.
GridResult evaluate_grid(const GridSpec& grid, const GridOptions& options = {});

// The same tensor by calling evaluate() at every point.
GridResult evaluate_pointwise(const GridSpec& grid, const GridOptions& options = {});

struct BenchmarkReport {
    int points = 0;
    int repetitions = 0;
    double grid_ms = 0;       // per repetition
    double pointwise_ms = 0;  // per repetition
    double oracle_ms = 0;     // extrapolated to the full grid
    int oracle_sampled_points = 0;
    std::int64_t grid_kernel_calls = 0;
    std::int64_t pointwise_kernel_calls = 0;
    double speedup = 0;  // pointwise_ms / grid_ms
};

BenchmarkReport benchmark(const GridSpec& grid, int repetitions, const GridOptions& options = {},
                          int oracle_samples = 8, double oracle_tol = 1e-10);

// Calls fn(i) for i in [0, count) on contiguous blocks, one per thread.
// Results must not depend on the partition.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// Thread count from TRISBF_THREADS, else 1.
int default_thread_count();

}  // namespace trisbf
