// Conditional measures on unstable manifolds and the two empirical SRB
// estimators.
//
// The Sinai density xi(x1, x2) is the infinite product of unstable Jacobian
// ratios along the backward orbits of two points on one manifold. Backward
// points are recovered stably: the manifolds of the successively shortened
// pasts are one forward graph-transform chain, and each backward step is a
// contractive base inversion along the previous curve, so no inverse
// iteration ever amplifies transverse error.
//
// The estimators: birkhoff_srb histograms long forward orbits of many seeds;
// pushforward_srb time-averages the forward images of an equal-weight point
// cloud drawn from (manifold curve, Sinai density) by inverse CDF. Both fill
// the same EmpiricalMeasure shape, so their observable vectors can be
// compared within combined Monte Carlo error.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srblab/curve.hpp"
#include "srblab/family.hpp"
#include "srblab/symbolic.hpp"

namespace srblab {

// |DF(v)| in max norm at (x, g(x)) for v = (1, Dg(x)), the unit tangent of
// the curve in max norm while |Dg| <= 1. Throws OutOfDomain when the point
// has no enumerated branch.
double unstable_jacobian(const PiecewiseMap& map, const CurveGraph& curve, double x);

struct SinaiValue {
    double xi = 1.0;
    double tail_bound = 0.0;  // geometric-decay bound on the dropped tail
};

// Truncated product of backward Jacobian ratios for two points on the
// unstable manifold of the past. Throws InsufficientPast when the past
// cannot supply `depth` backward steps plus a convergent base manifold.
SinaiValue sinai_pair(const PiecewiseMap& map, const Itinerary& past, double x1, double x2,
                      long depth);

struct SinaiDensity {
    CurveGraph curve;        // the unstable manifold carrying the density
    double basepoint = 0.5;  // x1; xi(basepoint, basepoint) = 1
    std::vector<double> xi;  // xi(basepoint, x_k) on the curve grid
    long depth = 0;
    double tail_bound = 0.0;
    double k6 = 1.0;  // sandwich constant: max over the grid of max(xi, 1/xi)
};

SinaiDensity sinai_density(const PiecewiseMap& map, const Itinerary& past, double basepoint,
                           long depth);

// Trapezoid integral of xi against the curve's arclength over [a, b].
double local_measure(const SinaiDensity& density, double a, double b);

// The observables every empirical measure reports, in order.
inline constexpr const char* kObservables[] = {"x", "y", "xx", "xy", "yy"};
inline constexpr int kObservableCount = 5;

struct EmpiricalMeasure {
    int m = 64;                // histogram is m x m over the unit square
    std::vector<double> mass;  // row-major [iy * m + ix], sums to 1
    double means[5] = {0, 0, 0, 0, 0};
    double sigmas[5] = {0, 0, 0, 0, 0};  // Monte Carlo error estimates
    long samples = 0;                    // histogrammed points
    long seeds_used = 0;
    long seeds_dropped = 0;
    double mass_leaked = 0.0;  // weight lost to branch-tail truncation

    double total_mass() const;
    // Sums blocks of factor x factor bins; m must be divisible by factor.
    std::vector<double> coarsen(int factor) const;
};

// Deterministic interior seed points for the Birkhoff estimator.
std::vector<Point2> default_seeds(int count, std::uint64_t seed);

// Amplitude of the per-step mantissa dither applied by the orbit samplers.
// Long orbits rely on rounding noise to stay Lebesgue-generic; maps whose
// branches are exactly representable in binary (baker(2): x -> 2x mod 1 is a
// pure bit shift) produce none, and every double seed collapses onto the
// dyadic lattice within 53 steps. A seeded counter-based dither of a few ulps
// restores generic rounding without disturbing any observable above 1e-15.
inline constexpr double kOrbitDither = 0x1.0p-50;

// Histogram of the union of forward orbits, sampling steps burn_in <= k < n
// (every stride-th step). Orbits that leave the enumerable branches are
// dropped and counted; post-boundary contact continues through the
// right-owning branch. Throws AllSeedsEscaped when nothing remains.
EmpiricalMeasure birkhoff_srb(const PiecewiseMap& map, const std::vector<Point2>& seeds, long n,
                              int m = 64, long burn_in = 1000, long stride = 1, int threads = 1,
                              std::uint64_t dither_seed = 0xd17ce5);

// Time average of the pushforwards of an equal-weight point cloud on the
// past's unstable manifold. Throws MassLeak when more than 0.1% of the
// weight falls off the enumerated branches; smaller losses are reported in
// mass_leaked.
EmpiricalMeasure pushforward_srb(const PiecewiseMap& map, const Itinerary& past, long n,
                                 int m = 64, long points = 4096, long density_depth = 20,
                                 long stride = 1, int threads = 1,
                                 std::uint64_t dither_seed = 0xd17ce5);

struct HolonomyPair {
    Point2 z;              // sample on gamma
    Point2 pi_z;           // its stable-holonomy image on eta
    double density = 1.0;  // matched cylinder-interval length ratio
    double deriv_ratio = 1.0;  // |D_gamma F^n(z)| / |D_eta F^n(pi(z))|
};

struct HolonomyReport {
    std::vector<HolonomyPair> pairs;
    double density_min = 1.0;
    double density_max = 1.0;
    double ratio_min = 1.0;
    double ratio_max = 1.0;
    long depth = 0;
    long dropped = 0;  // samples too close to a cylinder boundary
};

// Matches points of gamma to eta through depth-n cylinder membership and
// compares the transported length elements. Product-structure maps give
// density identically 1. Samples sit at seeded random offsets within their
// strata so that none starts on the dyadic lattice.
HolonomyReport holonomy_test(const PiecewiseMap& map, const CurveGraph& gamma,
                             const CurveGraph& eta, long depth, int pairs,
                             std::uint64_t sample_seed = 0x601d);

struct ChiSquareResult {
    double statistic = 0.0;
    long dof = 0;
    double p_value = 1.0;
    bool pass(double significance) const { return p_value >= significance; }
};

// Pearson test of a mass histogram against the uniform distribution, with
// total_samples independent draws behind the masses. Throws UnderSampled
// when the expected count per bin falls below min_expected.
ChiSquareResult chi_square_uniform(const std::vector<double>& mass, double total_samples,
                                   double min_expected = 20.0);

// Regularized upper incomplete gamma Q(a, x), the chi-square tail function.
double gamma_q(double a, double x);

}  // namespace srblab
