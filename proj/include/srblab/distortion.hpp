// Distortion of branch derivatives over small regions and along orbit
// compositions. The central quantity is
//   theta = sup over the region of |D^2 f(w)| * delta / |f1x(w)|,
// with delta the region's horizontal extent: it measures how much the
// derivative can fluctuate across the region. One-step fluctuation obeys an
// exp(C exp(C theta) |z-w|/delta) envelope with an empirically calibrated C,
// and derivative ratios along deep compositions stay uniformly bounded
// because the per-step separations shrink geometrically toward the past.
#pragma once

#include <cstdint>
#include <vector>

#include "srblab/curve.hpp"
#include "srblab/family.hpp"
#include "srblab/symbolic.hpp"

namespace srblab {

// Axis-aligned sampling box. Star-shapedness around any interior point is
// automatic, which is all the mean-value arguments need.
struct Region {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;

    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    bool contains(Point2 z) const {
        return z.x >= x_lo && z.x <= x_hi && z.y >= y_lo && z.y <= y_hi;
    }
    void validate() const;  // finite, positive width, inside the unit square
};

// Sampled supremum of |D^2 f| * width / |f1x| over the region, using the
// branch that contains z. Works on power maps, whose jets are composition
// jets. Throws OutOfDomain when z is outside the region or a sample point
// leaves the branch's extended domain; TailTruncated propagates from lookup.
double theta(const PiecewiseMap& map, Point2 z, const Region& region, int samples = 16);

struct FluctuationCheck {
    double actual = 1.0;  // |Df_z(v_z)| / |Df_w(v_w)| along unit curve tangents
    double bound = 1.0;   // exp(C exp(C theta) |z-w| / delta)
    double theta = 0.0;
};

// One-step derivative fluctuation between two points on a curve, against the
// calibrated envelope. xz/xw are curve abscissae; the region supplies theta
// and the scale delta.
FluctuationCheck fluctuation_check(const PiecewiseMap& map, const CurveGraph& curve, double xz,
                                   double xw, const Region& region, double C);

// A reproducible fluctuation trial: a straight probe curve inside one post,
// two marked points at separation 0.1 * region width.
struct FluctuationSample {
    CurveGraph line;
    double xz = 0.0;
    double xw = 0.0;
    Region region;
    long branch = 0;
};

std::vector<FluctuationSample> fluctuation_samples(const PiecewiseMap& map, int count,
                                                   std::uint64_t seed);

// Smallest constant (times a 1.2 safety factor) for which every trial in a
// freshly drawn training sample satisfies actual <= bound.
double calibrate_fluctuation_constant(const PiecewiseMap& map, int n_pairs = 1000,
                                      std::uint64_t seed = 2026);

struct DistortionReport {
    double theta = 0.0;      // of the depth-n composition over the sampled stretch
    double ratio_max = 1.0;  // sup of |DF^n_z(v_z)| / |DF^n_w(v_w)| over sampled pairs
    double ratio_min = 1.0;
    long depth = 0;
    double bound_rhs = 1.0;  // exp(C exp(C theta) K0/(K0-1)), the chained envelope
};

// Derivative-ratio spread of the depth-n composition along gamma across the
// post cylinder of the word. Per-step stretch factors are accumulated in
// compensated log space, so countable families with large branch derivatives
// cannot overflow. Throws DegenerateCylinder when the sampled intersection of
// gamma with the cylinder is thinner than 1e-14; InvalidArgument when n does
// not match the cylinder's depth.
DistortionReport composition_distortion(const PiecewiseMap& map, const CurveGraph& gamma,
                                        const Cylinder& cylinder, long n, double C = 4.0,
                                        int points = 33);

}  // namespace srblab
