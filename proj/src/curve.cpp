// Sampled curve graphs: uniform-grid storage with cubic Hermite readback for
// values and slopes and linear readback for curvature.
#include "srblab/curve.hpp"

#include <algorithm>
#include <cmath>

namespace srblab {

CurveGraph CurveGraph::constant(double value, int n, double lo, double hi) {
    if (n < 2) fail(Err::InvalidArgument, "curve grid needs at least 2 points");
    if (!(hi > lo)) fail(Err::InvalidArgument, "curve domain must be nonempty");
    CurveGraph c;
    c.x_lo = lo;
    c.x_hi = hi;
    c.g.assign(static_cast<std::size_t>(n), value);
    c.dg.assign(static_cast<std::size_t>(n), 0.0);
    c.d2g.assign(static_cast<std::size_t>(n), 0.0);
    return c;
}

namespace {

// Cell index and local coordinate for an abscissa, clamped to the domain.
inline void locate_cell(const CurveGraph& c, double x, int& k, double& t, double& h) {
    const int cells = c.n() - 1;
    h = c.spacing();
    double s = (x - c.x_lo) / h;
    s = std::clamp(s, 0.0, static_cast<double>(cells));
    k = std::min(static_cast<int>(s), cells - 1);
    t = s - k;
}

}  // namespace

double CurveGraph::value(double x) const {
    int k;
    double t, h;
    locate_cell(*this, x, k, t, h);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return g[k] * h00 + h * dg[k] * h10 + g[k + 1] * h01 + h * dg[k + 1] * h11;
}

double CurveGraph::deriv(double x) const {
    int k;
    double t, h;
    locate_cell(*this, x, k, t, h);
    const double t2 = t * t;
    const double d00 = (6.0 * t2 - 6.0 * t) / h;
    const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double d01 = (-6.0 * t2 + 6.0 * t) / h;
    const double d11 = 3.0 * t2 - 2.0 * t;
    return g[k] * d00 + dg[k] * d10 + g[k + 1] * d01 + dg[k + 1] * d11;
}

double CurveGraph::second(double x) const {
    int k;
    double t, h;
    locate_cell(*this, x, k, t, h);
    return d2g[k] * (1.0 - t) + d2g[k + 1] * t;
}

void CurveGraph::check_bounds(double alpha, double k2, double tol) const {
    for (int k = 0; k < n(); ++k) {
        if (std::fabs(dg[static_cast<std::size_t>(k)]) > alpha + tol)
            fail(Err::ConeEscape, "curve slope exceeds the cone aperture");
        if (std::fabs(d2g[static_cast<std::size_t>(k)]) > k2 + tol)
            fail(Err::InvalidArgument, "curve curvature exceeds its invariant ball");
        const double v = g[static_cast<std::size_t>(k)];
        if (v < -tol || v > 1.0 + tol)
            fail(Err::InvalidArgument, "curve values leave the unit interval");
    }
}

CurveDistance curve_distance(const CurveGraph& a, const CurveGraph& b) {
    if (a.n() != b.n())
        fail(Err::InvalidArgument, "curve distance needs matching grids");
    CurveDistance d;
    for (int k = 0; k < a.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        d.d0 = std::max(d.d0, std::fabs(a.g[i] - b.g[i]));
        d.d1 = std::max(d.d1, std::fabs(a.dg[i] - b.dg[i]));
        d.d2 = std::max(d.d2, std::fabs(a.d2g[i] - b.d2g[i]));
    }
    return d;
}

}  // namespace srblab
