// Distortion measurements. theta samples a region grid; fluctuation trials
// put straight probes inside single posts; composition ratios march orbit
// tangents along a branch word with compensated log-space accumulation.
#include "srblab/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srblab/error.hpp"
#include "srblab/rng.hpp"
#include "srblab/solve.hpp"

namespace srblab {

namespace {

// Kahan sum: per-step log factors span many scales on countable families.
struct CompensatedSum {
    double total = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = total + y;
        carry = (t - total) - y;
        total = t;
    }
};

double max_norm_vec(double v1, double v2) { return std::max(std::fabs(v1), std::fabs(v2)); }

// Stretch factor of the branch derivative on a max-norm unit tangent (1, s).
double tangent_stretch(const Jet& j, double s) {
    return max_norm_vec(j.f1x() + j.f1y() * s, j.f2x() + j.f2y() * s);
}

}  // namespace

void Region::validate() const {
    if (!(x_lo < x_hi) || !(y_lo <= y_hi))
        fail(Err::InvalidArgument, "region must have positive width and ordered heights");
    if (x_lo < -0.5 || x_hi > 1.5 || y_lo < -0.5 || y_hi > 1.5)
        fail(Err::InvalidArgument, "region must stay near the unit square");
}

double theta(const PiecewiseMap& map, Point2 z, const Region& region, int samples) {
    region.validate();
    if (samples < 1) fail(Err::InvalidArgument, "theta needs at least one sample per axis");
    if (!region.contains(z)) fail(Err::OutOfDomain, "theta base point must lie in the region");
    const auto lookup = map.f().locate(z);
    if (lookup.tail_truncated)
        fail(Err::TailTruncated, "theta base point is beyond the enumerated branches");
    const long branch = lookup.index;

    double sup = 0.0;
    for (int jy = 0; jy < samples; ++jy) {
        for (int jx = 0; jx < samples; ++jx) {
            const Point2 w{region.x_lo + (jx + 0.5) / samples * region.width(),
                           region.y_lo + (jy + 0.5) / samples * region.height()};
            if (!map.f().in_extended_domain(branch, w))
                fail(Err::OutOfDomain, "theta region leaves the branch's domain");
            const Jet j = map.f().jet(branch, w);
            sup = std::max(sup, j.d2_max_abs() / std::fabs(j.f1x()));
        }
    }
    return sup * region.width();
}

FluctuationCheck fluctuation_check(const PiecewiseMap& map, const CurveGraph& curve, double xz,
                                   double xw, const Region& region, double C) {
    const Point2 z{xz, curve.value(xz)};
    const Point2 w{xw, curve.value(xw)};
    FluctuationCheck out;
    out.theta = theta(map, z, region, 16);

    const long bz = map.f().locate(z).index;
    const long bw = map.f().locate(w).index;
    const double sz = tangent_stretch(map.f().jet(bz, z), curve.deriv(xz));
    const double sw = tangent_stretch(map.f().jet(bw, w), curve.deriv(xw));
    out.actual = sz / sw;

    const double dist = max_dist(z, w);
    out.bound = std::exp(C * std::exp(C * out.theta) * dist / region.width());
    return out;
}

std::vector<FluctuationSample> fluctuation_samples(const PiecewiseMap& map, int count,
                                                   std::uint64_t seed) {
    if (count < 1) fail(Err::InvalidArgument, "need at least one fluctuation sample");
    CounterRng rng(seed);
    std::vector<FluctuationSample> out;
    out.reserve(static_cast<std::size_t>(count));
    std::uint64_t ctr = 0;
    while (static_cast<int>(out.size()) < count) {
        const std::uint64_t k = ctr++;
        const Point2 probe{rng.open(1, k, 0.0, 1.0), rng.open(2, k, 0.05, 0.95)};
        const auto lookup = map.f().locate(probe);
        if (lookup.tail_truncated || lookup.boundary_adjacent) continue;

        const long b = lookup.index;
        const double y0 = probe.y;
        // Inner box of the post: inside the branch domain at every height, so
        // the region scale delta is the post width itself. That is the scale
        // at which composition chaining reuses the calibrated constant.
        double xl = 0.0, xr = 1.0;
        for (int q = 0; q <= 32; ++q) {
            const double yq = q / 32.0;
            xl = std::max(xl, map.f().x_left(b, yq));
            xr = std::min(xr, map.f().x_right(b, yq));
        }
        const double wb = xr - xl;
        if (!(wb > 0.0)) continue;
        // Separation up to 0.1 of the region width.
        const double r = wb * rng.open(3, k, 0.01, 0.05);
        const double s = map.cone.alpha * 0.8 * (2.0 * rng.open(4, k, 0.0, 1.0) - 1.0);
        const double c = xl + r + (wb - 2.0 * r) * rng.open(5, k, 0.05, 0.95);

        FluctuationSample fs;
        fs.branch = b;
        fs.xz = c - r;
        fs.xw = c + r;
        fs.region.x_lo = xl;
        fs.region.x_hi = xr;
        const double hh = std::fabs(s) * r + 0.02;
        fs.region.y_lo = std::max(0.0, y0 - hh);
        fs.region.y_hi = std::min(1.0, y0 + hh);
        fs.line = CurveGraph::constant(y0);
        for (int i = 0; i < fs.line.n(); ++i) {
            fs.line.g[static_cast<std::size_t>(i)] =
                std::clamp(y0 + s * (fs.line.x_at(i) - c), 0.0, 1.0);
            fs.line.dg[static_cast<std::size_t>(i)] = s;
        }
        out.push_back(std::move(fs));
    }
    return out;
}

double calibrate_fluctuation_constant(const PiecewiseMap& map, int n_pairs,
                                      std::uint64_t seed) {
    const auto trials = fluctuation_samples(map, n_pairs, seed);
    double c_needed = 1e-4;
    for (const auto& t : trials) {
        const FluctuationCheck probe = fluctuation_check(map, t.line, t.xz, t.xw, t.region, 1.0);
        const double target = std::log(std::max(probe.actual, 1.0 / probe.actual));
        if (target <= 0.0) continue;
        const Point2 z{t.xz, t.line.value(t.xz)};
        const Point2 w{t.xw, t.line.value(t.xw)};
        const double ratio = max_dist(z, w) / t.region.width();
        // Smallest C with C exp(C theta) ratio >= target; monotone in C.
        const double needed = bisect_predicate(
            [&](double cc) { return cc * std::exp(cc * probe.theta) * ratio >= target; }, 0.0,
            1000.0, 1e-10);
        c_needed = std::max(c_needed, needed);
    }
    return 1.2 * c_needed;
}

DistortionReport composition_distortion(const PiecewiseMap& map, const CurveGraph& gamma,
                                        const Cylinder& cylinder, long n, double C,
                                        int points) {
    if (cylinder.kind != CylinderKind::Post)
        fail(Err::InvalidArgument, "composition distortion needs a post cylinder");
    if (n != cylinder.itinerary.depth())
        fail(Err::InvalidArgument, "depth does not match the cylinder's word length");
    if (points < 33) points = 33;

    // Intersection of gamma with the cylinder: iterate x into the slice at
    // its own image height. Slices are near-vertical, the curve is flatter
    // than the cone, so the iteration contracts.
    const auto edge = [&](bool upper) {
        double x = 0.5 * (cylinder.bounds_at(gamma.value(0.5)).first +
                          cylinder.bounds_at(gamma.value(0.5)).second);
        for (int it = 0; it < 12; ++it) {
            const auto [lo, hi] = cylinder.bounds_at(gamma.value(std::clamp(x, 0.0, 1.0)));
            x = upper ? hi : lo;
        }
        return x;
    };
    const double xa = edge(false);
    const double xb = edge(true);
    if (!(xb - xa >= 1e-14))
        fail(Err::DegenerateCylinder, "curve crosses the cylinder in a sliver below 1e-14");

    const std::vector<long>& word = cylinder.itinerary.symbols;
    DistortionReport rep;
    rep.depth = n;

    // Per-point compensated log-derivative along the word, plus the full
    // composition jet for theta of the composition.
    double s_min = std::numeric_limits<double>::infinity();
    double s_max = -s_min;
    double theta_sup = 0.0;
    for (int k = 0; k < points; ++k) {
        const double x0 = xa + (k + 0.5) / points * (xb - xa);
        Point2 z{x0, gamma.value(x0)};
        double slope = gamma.deriv(x0);
        CompensatedSum logsum;
        Jet acc;
        bool first = true;
        for (long j = 0; j < n; ++j) {
            const long b = word[static_cast<std::size_t>(j)];
            const Jet jet = map.f().jet(b, z);
            acc = first ? jet : compose_jets(jet, acc);
            first = false;
            const double v1 = jet.f1x() + jet.f1y() * slope;
            const double v2 = jet.f2x() + jet.f2y() * slope;
            const double norm = max_norm_vec(v1, v2);
            logsum.add(std::log(norm));
            slope = v2 / v1;
            z = jet.value;
        }
        s_min = std::min(s_min, logsum.total);
        s_max = std::max(s_max, logsum.total);
        theta_sup = std::max(theta_sup, acc.d2_max_abs() / std::fabs(acc.f1x()));
    }

    rep.theta = theta_sup * (xb - xa);
    rep.ratio_max = std::exp(s_max - s_min);
    rep.ratio_min = std::exp(s_min - s_max);
    // Chained one-step envelopes: step separations relative to their posts
    // shrink geometrically toward the past, so their sum is at most
    // K0/(K0 - 1) regardless of depth.
    const double chain = map.cone.K0 / (map.cone.K0 - 1.0);
    rep.bound_rhs = std::exp(C * std::exp(C * rep.theta) * chain);
    return rep;
}

}  // namespace srblab
