// Basic geometry for maps of the unit square: points, tangent vectors under
// the max norm, invariant-cone parameters, and second-order jets of a branch.
//
// Conventions used throughout the library:
//   * norms on R^2 are max norms, |v| = max(|v1|,|v2|);
//   * the unstable cone K^u_a = { |v2| <= a|v1| }, the stable cone K^s_a is
//     its reflection { |v1| <= a|v2| };
//   * a jet stores the value, the 2x2 first-derivative matrix and, for each
//     output component, the symmetric second-derivative triple (xx, xy, yy).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "srblab/error.hpp"

namespace srblab {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec2 {
    double v1 = 0.0;
    double v2 = 0.0;
};

inline double max_norm(const Vec2& v) {
    return std::max(std::fabs(v.v1), std::fabs(v.v2));
}

inline double max_dist(const Point2& a, const Point2& b) {
    return std::max(std::fabs(a.x - b.x), std::fabs(a.y - b.y));
}

// Cone aperture a in (0,1) and expansion constant K0 > 1.
struct ConeParams {
    double alpha = 0.5;
    double K0 = 2.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            fail(Err::InvalidArgument, "cone alpha must lie in (0,1)");
        if (!(K0 > 1.0))
            fail(Err::InvalidArgument, "cone K0 must exceed 1");
    }
};

// Second-order jet of one branch at one point. d1[i][j] = d f_{i+1} / d x_j,
// d2[i] = (f_{i+1,xx}, f_{i+1,xy}, f_{i+1,yy}).
struct Jet {
    Point2 value;
    double d1[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double d2[2][3] = {{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};

    double f1x() const { return d1[0][0]; }
    double f1y() const { return d1[0][1]; }
    double f2x() const { return d1[1][0]; }
    double f2y() const { return d1[1][1]; }

    double f1xx() const { return d2[0][0]; }
    double f1xy() const { return d2[0][1]; }
    double f1yy() const { return d2[0][2]; }
    double f2xx() const { return d2[1][0]; }
    double f2xy() const { return d2[1][1]; }
    double f2yy() const { return d2[1][2]; }

    double jacobian() const { return f1x() * f2y() - f1y() * f2x(); }

    // |D^2 f|: the max over output components and index pairs, the quantity
    // entering the distortion condition.
    double d2_max_abs() const {
        double m = 0.0;
        for (const auto& row : d2)
            for (double v : row) m = std::max(m, std::fabs(v));
        return m;
    }

    Vec2 apply_d1(const Vec2& v) const {
        return {d1[0][0] * v.v1 + d1[0][1] * v.v2,
                d1[1][0] * v.v1 + d1[1][1] * v.v2};
    }
};

// Chain rule for jets: the jet of f∘g at z, given jet(g) at z and jet(f) at
// g(z). Second derivatives follow the usual expansion, e.g.
//   (f∘g)_{1xx} = f_{1xx} g_{1x}^2 + 2 f_{1xy} g_{1x} g_{2x} + f_{1yy} g_{2x}^2
//               + f_{1x} g_{1xx} + f_{1y} g_{2xx}.
inline Jet compose_jets(const Jet& outer, const Jet& inner) {
    Jet h;
    h.value = outer.value;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            h.d1[i][j] = outer.d1[i][0] * inner.d1[0][j] +
                         outer.d1[i][1] * inner.d1[1][j];

    const double g1x = inner.d1[0][0], g1y = inner.d1[0][1];
    const double g2x = inner.d1[1][0], g2y = inner.d1[1][1];
    for (int i = 0; i < 2; ++i) {
        const double fx = outer.d1[i][0], fy = outer.d1[i][1];
        const double fxx = outer.d2[i][0], fxy = outer.d2[i][1],
                     fyy = outer.d2[i][2];
        h.d2[i][0] = fxx * g1x * g1x + 2.0 * fxy * g1x * g2x +
                     fyy * g2x * g2x + fx * inner.d2[0][0] + fy * inner.d2[1][0];
        h.d2[i][1] = fxx * g1x * g1y + fxy * (g1x * g2y + g1y * g2x) +
                     fyy * g2x * g2y + fx * inner.d2[0][1] + fy * inner.d2[1][1];
        h.d2[i][2] = fxx * g1y * g1y + 2.0 * fxy * g1y * g2y +
                     fyy * g2y * g2y + fx * inner.d2[0][2] + fy * inner.d2[1][2];
    }
    return h;
}

inline bool in_unstable_cone(const Vec2& v, double alpha) {
    return std::fabs(v.v2) <= alpha * std::fabs(v.v1);
}

inline bool in_stable_cone(const Vec2& v, double alpha) {
    return std::fabs(v.v1) <= alpha * std::fabs(v.v2);
}

} // namespace srblab
