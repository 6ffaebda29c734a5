// Shared test utilities: a finite-difference jet oracle (the independent
// check that analytic jets are what they claim to be), deterministic sample
// points, and small numeric comparators.
#pragma once

#include <cmath>
#include <vector>

#include "srblab/family.hpp"
#include "srblab/rng.hpp"

namespace testutil {

using srblab::Jet;
using srblab::MapFamily;
using srblab::PiecewiseMap;
using srblab::Point2;

// Central finite differences of the forward evaluation. Step sizes chosen to
// balance truncation against cancellation for O(1)..O(100) derivative scales.
inline Jet fd_jet(const MapFamily& fam, long i, Point2 z) {
    const double h1 = 1e-6, h2 = 3e-4;
    Jet j;
    j.value = fam.forward(i, z);
    auto fx = [&](double dx, double dy) {
        return fam.forward(i, {z.x + dx, z.y + dy});
    };
    const Point2 xp = fx(h1, 0), xm = fx(-h1, 0), yp = fx(0, h1), ym = fx(0, -h1);
    j.d1[0][0] = (xp.x - xm.x) / (2 * h1);
    j.d1[1][0] = (xp.y - xm.y) / (2 * h1);
    j.d1[0][1] = (yp.x - ym.x) / (2 * h1);
    j.d1[1][1] = (yp.y - ym.y) / (2 * h1);

    const Point2 c = fx(0, 0);
    const Point2 xp2 = fx(h2, 0), xm2 = fx(-h2, 0), yp2 = fx(0, h2), ym2 = fx(0, -h2);
    const Point2 pp = fx(h2, h2), pm = fx(h2, -h2), mp = fx(-h2, h2), mm = fx(-h2, -h2);
    j.d2[0][0] = (xp2.x - 2 * c.x + xm2.x) / (h2 * h2);
    j.d2[1][0] = (xp2.y - 2 * c.y + xm2.y) / (h2 * h2);
    j.d2[0][2] = (yp2.x - 2 * c.x + ym2.x) / (h2 * h2);
    j.d2[1][2] = (yp2.y - 2 * c.y + ym2.y) / (h2 * h2);
    j.d2[0][1] = (pp.x - pm.x - mp.x + mm.x) / (4 * h2 * h2);
    j.d2[1][1] = (pp.y - pm.y - mp.y + mm.y) / (4 * h2 * h2);
    return j;
}

// Deterministic interior sample points, away from post boundaries.
inline std::vector<Point2> interior_points(const PiecewiseMap& map, int count,
                                           std::uint64_t seed = 17) {
    srblab::CounterRng rng(seed);
    std::vector<Point2> pts;
    pts.reserve(count);
    std::uint64_t ctr = 0;
    while (static_cast<int>(pts.size()) < count) {
        Point2 z{rng.open(1, ctr, 0.0, 1.0), rng.open(2, ctr, 0.0, 1.0)};
        ++ctr;
        const auto b = map.f().locate(z);
        if (b.tail_truncated || b.boundary_adjacent) continue;
        // keep well inside the post so FD probes stay in the neighborhood
        const double lo = map.f().x_left(b.index, z.y);
        const double hi = map.f().x_right(b.index, z.y);
        const double w = hi - lo;
        if (z.x - lo < 0.05 * w || hi - z.x < 0.05 * w) continue;
        if (z.y < 1e-3 || z.y > 1.0 - 1e-3) continue;
        pts.push_back(z);
    }
    return pts;
}

inline bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol;
}

inline bool close_rel(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

} // namespace testutil
