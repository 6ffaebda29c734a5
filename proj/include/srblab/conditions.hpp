// Sampled verification of the geometric and hyperbolicity conditions a
// piecewise-smooth map must satisfy: cone invariance and expansion margins,
// derivative-ratio bounds, the scale-normalized distortion supremum, post
// tiling, and the branch-width log series. All checks evaluate exact jets at
// grid samples and report worst-case margins; no interval rigor is claimed.
#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "srblab/family.hpp"
#include "srblab/geometry.hpp"

namespace srblab {

// Sampling resolution: nx * ny points per post, branches 1..branch_limit
// (clamped to the family's branch count).
struct SamplingGrid {
    int nx = 32;
    int ny = 32;
    long branch_limit = 100;

    void validate() const;
};

// One checked inequality. min_margin > 0 means the condition held at every
// sample; the worst sample is retained for diagnostics. worst_quantity is the
// raw measured value at the worst sample (for margin-style checks it equals
// the margin; for supremum-style checks it is the quantity itself).
struct ConditionEntry {
    ConditionEntry() = default;
    ConditionEntry(std::string n) : name(std::move(n)) {}

    std::string name;
    double min_margin = std::numeric_limits<double>::infinity();
    double worst_quantity = 0.0;
    Point2 worst_point{0.0, 0.0};
    long worst_branch = 0;
    std::string worst_label;
    long samples = 0;

    void offer(double margin, double quantity, const Point2& z, long branch,
               const std::string& label);
};

struct ConditionReport {
    std::vector<ConditionEntry> entries;
    std::string tail_note;

    bool all_nonnegative(double tol = 0.0) const;
    const ConditionEntry& entry(std::string_view name) const;
};

// Margins of the four cone-hyperbolicity inequalities in the max norm:
//   unstable_cone       alpha|f1x| - (|f2x| + alpha|f2y| + alpha^2|f1y|)
//   unstable_expansion  |f1x| - alpha|f1y| - K0
//   stable_cone         alpha|f1x| - (|f1y| + alpha|f2y| + alpha^2|f2x|)
//   stable_expansion    |f1x| - alpha|f2x| - |det Df| K0
// The stable pair bounds the inverse map's action on near-vertical vectors.
ConditionReport check_hyperbolicity(const PiecewiseMap& map, const ConeParams& cone,
                                    const SamplingGrid& grid);

// Direct check of what the margins above guarantee: Df maps the boundary rays
// (1, +-alpha) of the horizontal cone strictly inside it and stretches them by
// at least K0; Df^{-1} does the same to the rays (+-alpha, 1) of the vertical
// cone. Entries: unstable_cone_image, unstable_growth, stable_cone_preimage,
// stable_growth. Uses the same sample points as check_hyperbolicity.
ConditionReport check_cone_properties(const PiecewiseMap& map, const ConeParams& cone,
                                      const SamplingGrid& grid);

// Ratio bounds implied by the hyperbolicity margins:
//   shear_ratio        alpha - |f1y|/|f1x|
//   transverse_ratio   alpha - |f2x|/|f1x|
//   contraction_ratio  (1/K0^2 + alpha^2) - |f2y|/|f1x|
ConditionReport check_derivative_ratios(const PiecewiseMap& map, const ConeParams& cone,
                                        const SamplingGrid& grid);

// Sampled supremum of |D^2 f_i(z)| * zwidth_i(z) / |f_i1x(z)| against the
// map's bound C0. Single entry distortion_ratio: margin = C0 - supremum,
// worst_quantity = the supremum.
ConditionReport check_distortion_bound(const PiecewiseMap& map, const SamplingGrid& grid);

// Post tiling: posts_disjoint (smallest gap between x-sorted posts at sampled
// heights; ~0 for exact tilings, negative on overlap) and posts_cover (margin
// is minus the uncovered length interior to the sampled posts' span;
// worst_quantity is the total covered width). When the family declares
// pairwise-disjoint strips, a strips_disjoint entry checks the strip bands.
ConditionReport check_partition(const PiecewiseMap& map, const SamplingGrid& grid);

// Largest K0 for which the two expansion margins stay nonnegative on the
// grid, i.e. min over samples of |f1x| - alpha|f1y| and
// (|f1x| - alpha|f2x|) / |det Df|.
double largest_passing_K0(const PiecewiseMap& map, double alpha, const SamplingGrid& grid);

// Partial sum of -delta_max(i) log delta_min(i) over branches i <= n_max,
// where delta_max/delta_min are the extreme z-widths of post i over sampled
// heights. last_term supports convergence monitoring; diverging is set when
// the term at n_max exceeds the term a decade earlier.
struct SeriesTail {
    double partial_sum = 0.0;
    double last_term = 0.0;
    long terms = 0;
    bool diverging = false;
    std::string tail_note;
};

SeriesTail check_width_logsum(const PiecewiseMap& map, long n_max, int y_samples = 128);

// Same accumulation applied to explicit width sequences (delta_min[i] <=
// delta_max[i] required). Widths that underflow to zero contribute zero.
SeriesTail width_logsum_terms(const std::vector<double>& delta_max,
                              const std::vector<double>& delta_min);

// Sum over n >= 1 of sum_{i in D_n} x_i with D_n = { i : y_i <= exp(-eps n) },
// computed by grouping index i into every D_n with n <= floor(-log(y_i)/eps)
// and summing j * c_j over the group totals c_j. Inputs landing exactly on a
// group boundary count as members (a 1e-9 nudge absorbs log/exp rounding).
// Requires x_i > 0, y_i in (0,1), eps > 0.
double tail_sum(const std::vector<double>& x, const std::vector<double>& y, double eps);

}  // namespace srblab
