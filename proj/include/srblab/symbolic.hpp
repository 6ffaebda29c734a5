// Symbolic dynamics layer: itineraries of orbits, cylinder sets (full-height
// posts refined by forward words, full-width strips built from backward
// words), and the coding map sending a bi-infinite symbol string to the point
// whose orbit realizes it.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "srblab/family.hpp"
#include "srblab/geometry.hpp"

namespace srblab {

enum class Orientation { Forward, Backward };

// A finite branch word. Forward words index steps 0..n-1 of an orbit's
// future; backward words index steps -n+1..0 of its past, oldest first.
struct Itinerary {
    std::vector<long> symbols;
    Orientation orientation = Orientation::Forward;

    void validate() const;  // nonempty, every symbol >= 1
    long depth() const { return static_cast<long>(symbols.size()); }
};

// Result of following an orbit: the symbols read before any stop, plus the
// step index at which the orbit landed within kBoundaryTol of a post
// boundary (boundary contact is data, not a fault).
struct ItineraryResult {
    Itinerary itinerary;
    std::optional<long> boundary_hit;
};

// Reads n symbols of z's forward orbit. With strict_interior set, stops with
// boundary_hit at the first step whose point is boundary-adjacent; otherwise
// the right-owning branch convention applies and the walk continues. Throws
// TailTruncated/OutOfDomain as branch lookup does.
ItineraryResult forward_itinerary(const PiecewiseMap& map, Point2 z, long n,
                                  bool strict_interior = true);

enum class CylinderKind { Post, Strip };

// Cross-section bounds at one sampled level: for post cylinders `at` is a
// height y and [lo, hi] the x-slice; for strip cylinders `at` is an abscissa
// and [lo, hi] the vertical extent.
struct CylinderLevel {
    double at = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct Cylinder {
    CylinderKind kind = CylinderKind::Post;
    Itinerary itinerary;
    std::vector<CylinderLevel> levels;

    double width_min() const;
    double width_max() const;
    // Linear interpolation of [lo, hi] between the two nearest levels,
    // clamped at the ends.
    std::pair<double, double> bounds_at(double coord) const;
};

// Post cylinder of a forward word: the set of points whose first symbols are
// the word, localized in x. Slices are computed exactly by backward pullback
// at n_levels equally spaced heights including both edges.
Cylinder make_post_cylinder(const PiecewiseMap& map, const Itinerary& word, int n_levels = 17);

// Strip cylinder of a backward word: the forward image of the word's post
// cylinder under the word's branch composition, localized in y. Bounds come
// from pushing x_samples points of the bottom and top post edges forward.
Cylinder make_strip_cylinder(const PiecewiseMap& map, const Itinerary& word, int x_samples = 16);

// Extends a post cylinder by one more symbol and recomputes its bounds.
Cylinder refine_cylinder(const PiecewiseMap& map, const Cylinder& c, long symbol);

// The point coded by a past/future symbol pair, found by intersecting the
// depth-n post cylinder of the future with the depth-n strip cylinder of the
// past. residual is the larger of the two final cross-section diameters and
// shrinks like K0^-depth.
struct CodedPoint {
    Point2 z{0.0, 0.0};
    double residual = 0.0;
};

CodedPoint point_from_itinerary(const PiecewiseMap& map, const Itinerary& past,
                                const Itinerary& future, long depth);

}  // namespace srblab
