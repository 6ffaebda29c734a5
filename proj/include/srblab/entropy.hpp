// Entropy of the SRB measure by four routes that must agree:
//
//   derivative_growth  (1/n) log |F^n_1x| averaged over seed orbits, computed
//                      by transporting the horizontal frame vector with
//                      per-step renormalization (never a matrix product, so
//                      nothing overflows).
//   directional        (1/n) log |DF^n(z) v| for one cone vector on one
//                      orbit. Differs from the horizontal rate by at most
//                      (1/n) log((1+a^2)/(1-a^2)) at every step.
//   cylinder           -(1/d) log of the orbit visit frequency of the
//                      point's own depth-d symbol cylinder, per depth.
//   integral           sample mean of log |D^uF| along SRB-distributed
//                      orbits with transported unit tangents; demands the
//                      declared-disjoint-strips property.
//
// All orbit walks share the seeded per-step dither of the SRB estimators
// (see kOrbitDither in measures.hpp) so exactly-binary maps stay generic,
// and all are byte-deterministic for a fixed dither seed and thread count.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srblab/family.hpp"
#include "srblab/geometry.hpp"

namespace srblab {

struct EntropyEstimate {
    double value = 0.0;  // nats
    std::string route;
    long n = 0;          // orbit length behind the estimate
    double spread = 0.0;  // route-specific error proxy, see each operation
    long seeds_used = 0;
    long seeds_dropped = 0;
};

// Mean over seeds of the horizontal growth rate. spread is the standard
// error of the mean across seeds. Orbits that leave the enumerable branches
// are dropped and counted; throws AllSeedsEscaped when none remain and
// InvalidArgument when n < 1000 (shorter windows have not converged).
EntropyEstimate entropy_derivative_growth(const PiecewiseMap& map, const std::vector<Point2>& seeds,
                                          long n, int threads = 1,
                                          std::uint64_t dither_seed = 0xd17ce5);

// Growth rate of one cone vector on the orbit of z. The orbit and dither
// stream coincide with seed index 0 of the seed-set routes, so prefixes of
// one orbit can be compared across calls. Throws InvalidArgument when v
// leaves the alpha-cone at the start and ConeEscape if transport ever
// ejects it (that signals broken hyperbolicity conditions).
EntropyEstimate entropy_directional(const PiecewiseMap& map, Point2 z, Vec2 v, long n,
                                    std::uint64_t dither_seed = 0xd17ce5);

struct CylinderEntropyPoint {
    long depth = 0;
    double value = 0.0;  // -(1/depth) log visit frequency
    long visits = 0;
};

// Visit-frequency estimates for the nested cylinders of z's own itinerary,
// one per depth in [depth_lo, depth_hi]. estimate carries the deepest value;
// its spread is the gap to the previous depth (the trend's last step).
struct CylinderEntropy {
    std::vector<CylinderEntropyPoint> by_depth;
    EntropyEstimate estimate;
};

// Walks one orbit of length n, reads its symbol stream, and counts sliding
// window matches of the stream's own first depth_hi symbols. Throws
// UnderSampled naming the first depth with fewer than 30 visits. An orbit
// that leaves the enumerable branches is truncated there and the shortened
// length reported in estimate.n.
CylinderEntropy entropy_cylinder(const PiecewiseMap& map, Point2 z, long depth_lo, long depth_hi,
                                 long n, std::uint64_t dither_seed = 0xd17ce5);

// Sample mean of log |D^uF| over the same orbit ensemble the Birkhoff SRB
// estimator histograms (steps burn_in <= k < n), with the unstable direction
// at each sample obtained by transporting a tangent along its orbit. Only
// defined for maps declaring disjoint strips; throws StripsOverlap
// otherwise.
EntropyEstimate entropy_integral(const PiecewiseMap& map, const std::vector<Point2>& seeds, long n,
                                 long burn_in = 1000, int threads = 1,
                                 std::uint64_t dither_seed = 0xd17ce5);

}  // namespace srblab
