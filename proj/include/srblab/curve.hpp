// A sampled C^2 curve graph y = g(x) carrying value, slope, and curvature
// fields on a uniform grid. Values and slopes are read back through cubic
// Hermite interpolation (so grid data is reproduced exactly and the readback
// is C^1); curvature is interpolated linearly.
#pragma once

#include <vector>

#include "srblab/error.hpp"

namespace srblab {

struct CurveGraph {
    double x_lo = 0.0;
    double x_hi = 1.0;
    std::vector<double> g, dg, d2g;

    static CurveGraph constant(double value, int n = 257, double lo = 0.0, double hi = 1.0);

    int n() const { return static_cast<int>(g.size()); }
    double spacing() const { return (x_hi - x_lo) / (n() - 1); }
    double x_at(int k) const { return x_lo + k * spacing(); }

    double value(double x) const;
    double deriv(double x) const;
    double second(double x) const;

    // Invariant check: |dg| <= alpha, |d2g| <= k2, g within [0,1], all with
    // slack tol. Throws ConeEscape on a slope violation, InvalidArgument on
    // the others.
    void check_bounds(double alpha, double k2, double tol = 1e-9) const;
};

// Sup-differences over the shared grid of two curves of equal layout.
struct CurveDistance {
    double d0 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

CurveDistance curve_distance(const CurveGraph& a, const CurveGraph& b);

}  // namespace srblab
