// Generic MapFamily machinery: the nested 1-D branch inverse, strip bounds by
// edge mapping, cylinder slices, and the power-map family.

#include "srblab/family.hpp"

#include <algorithm>
#include <cmath>

#include "srblab/solve.hpp"

namespace srblab {

namespace {

// x on the horizontal line at height y with f1(x,y) = target, solved inside
// the post slice of branch i (slightly widened so boundary targets resolve).
double solve_f1_on_line(const MapFamily& fam, long i, double y, double target) {
    double lo = fam.x_left(i, y), hi = fam.x_right(i, y);
    const double pad = 1e-9 * std::max(1.0, hi - lo);
    lo -= pad;
    hi += pad;
    auto fn = [&](double x) { return fam.forward(i, {x, y}).x - target; };
    auto dfn = [&](double x) { return fam.jet(i, {x, y}).f1x(); };
    return newton_bisect(fn, dfn, lo, hi, 1e-14);
}

} // namespace

Point2 MapFamily::inverse(long i, Point2 w) const {
    // Outer solve in y: r(y) = f2(x(y), y) - w.y with f1(x(y), y) = w.x.
    // dr/dy = J / f1x, so r is strictly monotone and [0,1] brackets the root
    // for any w in the strip.
    auto x_of_y = [&](double y) { return solve_f1_on_line(*this, i, y, w.x); };
    auto r = [&](double y) { return forward(i, {x_of_y(y), y}).y - w.y; };
    auto dr = [&](double y) {
        const Jet j = jet(i, {x_of_y(y), y});
        return j.jacobian() / j.f1x();
    };
    const double y = newton_bisect(r, dr, -1e-9, 1.0 + 1e-9, 1e-13);
    return {x_of_y(y), y};
}

void MapFamily::strip_bounds(long i, double x, double& y_bot,
                             double& y_top) const {
    double a = forward(i, {solve_f1_on_line(*this, i, 0.0, x), 0.0}).y;
    double b = forward(i, {solve_f1_on_line(*this, i, 1.0, x), 1.0}).y;
    y_bot = std::min(a, b);
    y_top = std::max(a, b);
}

std::string MapFamily::branch_label(long i) const { return std::to_string(i); }

bool MapFamily::in_extended_domain(long i, Point2 z) const {
    if (z.y < -1e-9 || z.y > 1.0 + 1e-9) return false;
    const double yc = std::clamp(z.y, 0.0, 1.0);
    const double lo = x_left(i, yc), hi = x_right(i, yc);
    const double margin = 0.25 * (hi - lo) + 1e-9;
    return z.x >= lo - margin && z.x <= hi + margin;
}

BranchLookup branch_of(const PiecewiseMap& map, Point2 z, bool require_branch) {
    if (z.x < -1e-12 || z.x > 1.0 + 1e-12 || z.y < -1e-12 || z.y > 1.0 + 1e-12)
        fail(Err::OutOfDomain, "branch_of: point outside the unit square");
    const BranchLookup b = map.f().locate(z);
    if (b.tail_truncated && require_branch)
        fail(Err::TailTruncated,
             "branch_of: point beyond enumerable branches of " + map.f().name());
    return b;
}

double zwidth(const PiecewiseMap& map, long i, Point2 z) {
    return map.f().x_right(i, z.y) - map.f().x_left(i, z.y);
}

Jet jet_at(const PiecewiseMap& map, long i, Point2 z) {
    if (!map.f().in_extended_domain(i, z))
        fail(Err::OutOfDomain, "jet_at: point outside extension neighborhood of branch " +
                                   map.f().branch_label(i));
    return map.f().jet(i, z);
}

// --- cylinder slices ---------------------------------------------------------

namespace {

void cylinder_slice_affine(const MapFamily& fam, const std::vector<long>& it,
                           double y, double& lo, double& hi) {
    const size_t t = it.size();
    lo = fam.x_left(it[t - 1], y);
    hi = fam.x_right(it[t - 1], y);
    for (size_t k = t - 1; k-- > 0;) {
        const long b = it[k];
        // x-part is affine and y-independent: invert f1 through slope and
        // intercept taken at the post.
        const double y0 = 0.5;
        const double xl = fam.x_left(b, y0), xr = fam.x_right(b, y0);
        const double slope = fam.jet(b, {0.5 * (xl + xr), y0}).f1x();
        const double icept = fam.forward(b, {xl, y0}).x - slope * xl;
        double a = (lo - icept) / slope, c = (hi - icept) / slope;
        if (a > c) std::swap(a, c);
        lo = std::max(a, xl);
        hi = std::min(c, xr);
        if (!(lo < hi)) fail(Err::EmptyCylinder, "cylinder_slice: empty refinement");
    }
}

} // namespace

void cylinder_slice(const MapFamily& fam, const std::vector<long>& it, double y,
                    double& lo, double& hi) {
    if (it.empty()) fail(Err::InvalidArgument, "cylinder_slice: empty itinerary");
    if (fam.affine()) {
        cylinder_slice_affine(fam, it, y, lo, hi);
        return;
    }
    lo = fam.x_left(it[0], y);
    hi = fam.x_right(it[0], y);
    // Orbit through the prescribed prefix; analytic continuation keeps the
    // evaluation meaningful slightly outside exact posts.
    auto orbit = [&](double x, size_t steps) {
        Point2 w{x, y};
        for (size_t k = 0; k < steps; ++k) w = fam.forward(it[k], w);
        return w;
    };
    for (size_t k = 1; k < it.size(); ++k) {
        const long b = it[k];
        auto edge = [&](bool left) {
            auto s = [&](double x) {
                const Point2 w = orbit(x, k);
                const double bound =
                    left ? fam.x_left(b, std::clamp(w.y, 0.0, 1.0))
                         : fam.x_right(b, std::clamp(w.y, 0.0, 1.0));
                return w.x - bound;
            };
            const double slo = s(lo), shi = s(hi);
            if (slo == 0.0) return lo;
            if (shi == 0.0) return hi;
            if (slo * shi > 0.0) {
                // Constraint not binding on this side (or empty cylinder).
                if (left && slo > 0.0) return lo;
                if (!left && shi < 0.0) return hi;
                fail(Err::EmptyCylinder, "cylinder_slice: empty refinement");
            }
            double a = lo, c = hi;
            bool aneg = slo < 0.0;
            for (int iter = 0; iter < 120 && (c - a) > 1e-16; ++iter) {
                const double m = 0.5 * (a + c);
                if ((s(m) < 0.0) == aneg) a = m; else c = m;
            }
            return 0.5 * (a + c);
        };
        const double nl = edge(true), nh = edge(false);
        lo = nl;
        hi = nh;
        if (!(lo < hi)) fail(Err::EmptyCylinder, "cylinder_slice: empty refinement");
    }
}

// --- power families ----------------------------------------------------------

PowerFamily::PowerFamily(std::shared_ptr<const MapFamily> base, int t,
                         long depth_limit)
    : base_(std::move(base)), t_(t) {
    if (t < 1) fail(Err::InvalidArgument, "power_map: t must be >= 1");
    if (depth_limit < 1)
        fail(Err::InvalidArgument, "power_map: depth_limit must be >= 1");
    // Largest alphabet A with A^t <= depth_limit, at least 1. The floating
    // root can land one off in either direction; settle it exactly.
    long a = static_cast<long>(std::floor(std::pow(
                 static_cast<double>(depth_limit), 1.0 / static_cast<double>(t)))) +
             2;
    while (a > 1 && std::pow(static_cast<double>(a), t) > static_cast<double>(depth_limit))
        --a;
    alphabet_ = std::max(1L, std::min(a, base_->max_branch()));
}

std::string PowerFamily::name() const {
    return base_->name() + "^" + std::to_string(t_);
}

long PowerFamily::max_branch() const {
    double n = 1.0;
    for (int k = 0; k < t_; ++k) n *= static_cast<double>(alphabet_);
    return static_cast<long>(n);
}

std::vector<long> PowerFamily::itinerary_of(long i) const {
    if (i < 1 || i > max_branch())
        fail(Err::InvalidArgument, "power_map: branch id out of range");
    std::vector<long> it(static_cast<size_t>(t_));
    long v = i - 1;
    for (int k = t_ - 1; k >= 0; --k) {
        it[static_cast<size_t>(k)] = 1 + (v % alphabet_);
        v /= alphabet_;
    }
    return it;
}

long PowerFamily::id_of(const std::vector<long>& it) const {
    long v = 0;
    for (long s : it) {
        if (s < 1 || s > alphabet_)
            fail(Err::TailTruncated, "power_map: symbol beyond alphabet cap");
        v = v * alphabet_ + (s - 1);
    }
    return v + 1;
}

BranchLookup PowerFamily::locate(Point2 z) const {
    std::vector<long> it;
    it.reserve(static_cast<size_t>(t_));
    BranchLookup out;
    Point2 w = z;
    for (int k = 0; k < t_; ++k) {
        const BranchLookup b = base_->locate(w);
        out.boundary_adjacent = out.boundary_adjacent || b.boundary_adjacent;
        if (b.tail_truncated || b.index > alphabet_) {
            out.tail_truncated = true;
            return out;
        }
        it.push_back(b.index);
        if (k + 1 < t_) w = base_->forward(b.index, w);
    }
    out.index = id_of(it);
    return out;
}

Point2 PowerFamily::forward(long i, Point2 z) const {
    Point2 w = z;
    for (long s : itinerary_of(i)) w = base_->forward(s, w);
    return w;
}

Jet PowerFamily::jet(long i, Point2 z) const {
    const std::vector<long> it = itinerary_of(i);
    Jet acc = base_->jet(it[0], z);
    Point2 w = acc.value;
    for (size_t k = 1; k < it.size(); ++k) {
        const Jet step = base_->jet(it[k], w);
        acc = compose_jets(step, acc);
        w = acc.value;
    }
    return acc;
}

Point2 PowerFamily::inverse(long i, Point2 w) const {
    const std::vector<long> it = itinerary_of(i);
    Point2 z = w;
    for (size_t k = it.size(); k-- > 0;) z = base_->inverse(it[k], z);
    return z;
}

double PowerFamily::x_left(long i, double y) const {
    double lo, hi;
    cylinder_slice(*base_, itinerary_of(i), y, lo, hi);
    return lo;
}

double PowerFamily::x_right(long i, double y) const {
    double lo, hi;
    cylinder_slice(*base_, itinerary_of(i), y, lo, hi);
    return hi;
}

std::string PowerFamily::branch_label(long i) const {
    std::string s = "(";
    const std::vector<long> it = itinerary_of(i);
    for (size_t k = 0; k < it.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(it[k]);
    }
    return s + ")";
}

bool PowerFamily::in_extended_domain(long i, Point2 z) const {
    // Walk the prescribed branches, requiring each step to stay within the
    // corresponding base extension neighborhood.
    Point2 w = z;
    for (long s : itinerary_of(i)) {
        if (!base_->in_extended_domain(s, w)) return false;
        w = base_->forward(s, w);
    }
    return true;
}

PiecewiseMap power_map(const PiecewiseMap& map, int t, long depth_limit) {
    PiecewiseMap out;
    out.fam = std::make_shared<PowerFamily>(map.fam, t, depth_limit);
    out.cone = map.cone;
    out.cone.K0 = std::pow(map.cone.K0, t);
    out.C0 = map.C0;
    return out;
}

} // namespace srblab
