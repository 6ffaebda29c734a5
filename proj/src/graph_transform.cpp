// Graph-transform engine. A transform step solves the base equation
// f1(u, g(u)) = x pointwise on the output grid, then transports value, slope,
// and curvature through the branch jet at (u, g(u)):
//   D1 = 1 / (f1x + f1y H)
//   R1 = (f2x + f2y H) D1
//   D2 = -(f1xx + 2 f1xy H + f1yy H^2 + f1y J) D1^3
//   R2 = (f2xx + 2 f2xy H + f2yy H^2 + f2y J) D1^2 + (f2x + f2y H) D2.
// Manifolds iterate suffix chains of a backward word with tracer-seeded
// constants, so successive chains agree exactly on affine families and
// contract geometrically otherwise.
#include "srblab/graph_transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>
#include <utility>

#include "srblab/error.hpp"
#include "srblab/families.hpp"
#include "srblab/solve.hpp"

namespace srblab {

namespace {

// Horizontal extent of a post over all heights: a bracket that contains the
// base-equation solution for every x in the branch image.
std::pair<double, double> post_extent(const MapFamily& fam, long branch) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const int samples = 33;
    for (int k = 0; k < samples; ++k) {
        const double y = static_cast<double>(k) / (samples - 1);
        lo = std::min(lo, fam.x_left(branch, y));
        hi = std::max(hi, fam.x_right(branch, y));
    }
    return {lo, hi};
}

double solve_base(const MapFamily& fam, long branch, const CurveGraph& g, double x, double tl,
                  double tr) {
    const auto base = [&](double t) { return fam.forward(branch, {t, g.value(t)}).x - x; };
    const auto dbase = [&](double t) {
        const Jet j = fam.jet(branch, {t, g.value(t)});
        return j.f1x() + j.f1y() * g.deriv(t);
    };
    return newton_bisect(base, dbase, tl, tr, 1e-13);
}

void require_backward_word(const PiecewiseMap& map, const std::vector<long>& p) {
    if (p.empty()) fail(Err::InvalidArgument, "manifold iteration needs a nonempty word");
    for (long s : p) {
        if (s < 1) fail(Err::InvalidArgument, "itinerary symbols must be >= 1");
        if (s > map.f().max_branch())
            fail(Err::TailTruncated,
                 "symbol " + std::to_string(s) + " exceeds the family's branch count");
    }
}

}  // namespace

double invert_base(const MapFamily& fam, long branch, const CurveGraph& g, double x) {
    const auto [tl, tr] = post_extent(fam, branch);
    return solve_base(fam, branch, g, x, tl, tr);
}

double transport_slope(const Jet& j, double h) {
    const double denom = j.f1x() + j.f1y() * h;
    if (std::fabs(denom) < 1e-300)
        fail(Err::ContractionViolated, "base derivative vanished during slope transport");
    const double r1 = (j.f2x() + j.f2y() * h) / denom;
    if (std::fabs(r1) > 1.0 + 1e-9)
        fail(Err::ContractionViolated, "transported slope left the unit ball");
    return r1;
}

double transport_curvature(const Jet& j, double h, double jc) {
    const double d1 = 1.0 / (j.f1x() + j.f1y() * h);
    const double d1sq = d1 * d1;
    const double d2u =
        -(j.f1xx() + 2.0 * j.f1xy() * h + j.f1yy() * h * h + j.f1y() * jc) * d1sq * d1;
    return (j.f2xx() + 2.0 * j.f2xy() * h + j.f2yy() * h * h + j.f2y() * jc) * d1sq +
           (j.f2x() + j.f2y() * h) * d2u;
}

CurveGraph apply_graph_transform(const MapFamily& fam, long branch, const CurveGraph& g,
                                 int n_out) {
    if (n_out <= 0) n_out = g.n();
    if (n_out < 2) fail(Err::InvalidArgument, "transform output grid needs at least 2 points");
    const auto [tl, tr] = post_extent(fam, branch);
    CurveGraph out;
    out.x_lo = 0.0;
    out.x_hi = 1.0;
    out.g.resize(static_cast<std::size_t>(n_out));
    out.dg.resize(static_cast<std::size_t>(n_out));
    out.d2g.resize(static_cast<std::size_t>(n_out));
    for (int k = 0; k < n_out; ++k) {
        const double x = static_cast<double>(k) / (n_out - 1);
        const double u = solve_base(fam, branch, g, x, tl, tr);
        const Jet j = fam.jet(branch, {u, g.value(u)});
        const double h = g.deriv(u);
        const double jc = g.second(u);
        const auto i = static_cast<std::size_t>(k);
        out.g[i] = std::clamp(j.value.y, 0.0, 1.0);
        out.dg[i] = transport_slope(j, h);
        out.d2g[i] = transport_curvature(j, h, jc);
    }
    return out;
}

CurvatureBudget curvature_budget(const PiecewiseMap& map, const std::vector<long>& branches,
                                 int samples) {
    if (branches.empty()) fail(Err::InvalidArgument, "curvature budget needs branches");
    if (samples < 1) fail(Err::InvalidArgument, "curvature budget needs samples >= 1");
    CurvatureBudget b;
    b.slope_budget_slack = std::numeric_limits<double>::infinity();
    for (long br : branches) {
        for (int jy = 0; jy < samples; ++jy) {
            const double y = (jy + 0.5) / samples;
            const double xl = map.f().x_left(br, y);
            const double xr = map.f().x_right(br, y);
            for (int jx = 0; jx < samples; ++jx) {
                const double x = xl + (jx + 0.5) / samples * (xr - xl);
                const Jet j = map.f().jet(br, {x, y});
                const double f1x = std::fabs(j.f1x());
                const double e12 = std::fabs(j.f1y()) / f1x;
                const double e21 = std::fabs(j.f2x()) / f1x;
                const double e22 = std::fabs(j.f2y()) / f1x;
                if (e12 >= 1.0 - 1e-9)
                    fail(Err::ContractionViolated,
                         "slope shear ratio reaches 1; the transform has no slope budget");
                const double one = 1.0 - e12;
                const double d2 = j.d2_max_abs();
                const double a1 =
                    4.0 * d2 / (f1x * f1x * one * one) * (1.0 + (e21 + e22) / one);
                const double a2 = (e21 + e22) * e12 / (one * one * one * f1x) +
                                  e22 / (one * one * f1x);
                b.a1 = std::max(b.a1, a1);
                b.a2 = std::max(b.a2, a2);
                b.slope_budget_slack =
                    std::min(b.slope_budget_slack, 1.0 - (e21 + e22) / one);
            }
        }
    }
    if (b.a2 >= 1.0)
        fail(Err::ContractionViolated,
             "curvature feedback coefficient >= 1; raise the power parameter");
    b.k2 = std::max(1.05 * b.a1 / (1.0 - b.a2), 1e-9);
    b.curvature_feedback_slack = 1.0 - b.a2;
    b.curvature_ball_slack = b.k2 * (1.0 - b.a2) - b.a1;
    return b;
}

// --- coordinate-swapped inverse family ---------------------------------------

namespace {

class SwappedInverseFamily : public MapFamily {
public:
    explicit SwappedInverseFamily(std::shared_ptr<const MapFamily> base)
        : base_(std::move(base)) {}

    std::string name() const override { return base_->name() + "_reversed"; }
    long max_branch() const override { return base_->max_branch(); }
    bool affine() const override { return base_->affine(); }
    bool declares_disjoint_strips() const override { return true; }

    BranchLookup locate(Point2 w) const override {
        // Posts of this family are the swapped strips of the base family;
        // scan the enumerable range for the band containing w.
        const long cap = std::min<long>(base_->max_branch(), 100000);
        for (long i = 1; i <= cap; ++i) {
            double lo = 0.0, hi = 0.0;
            base_->strip_bounds(i, w.y, lo, hi);
            const bool inside = w.x >= lo && (w.x < hi || (i == cap && w.x <= hi));
            if (inside) {
                BranchLookup out;
                out.index = i;
                out.boundary_adjacent =
                    std::min(w.x - lo, hi - w.x) <= kBoundaryTol;
                return out;
            }
        }
        BranchLookup out;
        out.index = cap;
        out.tail_truncated = true;
        return out;
    }

    Point2 forward(long i, Point2 w) const override {
        const Point2 z = base_->inverse(i, {w.y, w.x});
        return {z.y, z.x};
    }

    Jet jet(long i, Point2 w) const override {
        const Point2 z = base_->inverse(i, {w.y, w.x});
        const Jet jf = base_->jet(i, z);
        const double det = jf.jacobian();
        if (det == 0.0)
            fail(Err::InvalidArgument, "branch derivative is singular; cannot invert");
        // DP = (Df)^{-1} at the preimage.
        const double p[2][2] = {{jf.f2y() / det, -jf.f1y() / det},
                                {-jf.f2x() / det, jf.f1x() / det}};
        // T[a][b][c] = second derivative of the inverse map:
        // -sum_r DP[a][r] * (D2f_r contracted with DP columns b and c).
        double T[2][2][2];
        for (int bb = 0; bb < 2; ++bb) {
            for (int cc = 0; cc < 2; ++cc) {
                double q[2];
                for (int r = 0; r < 2; ++r) {
                    q[r] = jf.d2[r][0] * p[0][bb] * p[0][cc] +
                           jf.d2[r][1] * (p[0][bb] * p[1][cc] + p[1][bb] * p[0][cc]) +
                           jf.d2[r][2] * p[1][bb] * p[1][cc];
                }
                for (int a = 0; a < 2; ++a)
                    T[a][bb][cc] = -(p[a][0] * q[0] + p[a][1] * q[1]);
            }
        }
        // Conjugation by the coordinate swap exchanges component and
        // argument indices.
        Jet out;
        out.value = {z.y, z.x};
        out.d1[0][0] = p[1][1];
        out.d1[0][1] = p[1][0];
        out.d1[1][0] = p[0][1];
        out.d1[1][1] = p[0][0];
        out.d2[0][0] = T[1][1][1];
        out.d2[0][1] = T[1][1][0];
        out.d2[0][2] = T[1][0][0];
        out.d2[1][0] = T[0][1][1];
        out.d2[1][1] = T[0][1][0];
        out.d2[1][2] = T[0][0][0];
        return out;
    }

    Point2 inverse(long i, Point2 w) const override {
        const Point2 z = base_->forward(i, {w.y, w.x});
        return {z.y, z.x};
    }

    double x_left(long i, double y) const override {
        double lo = 0.0, hi = 0.0;
        base_->strip_bounds(i, y, lo, hi);
        return lo;
    }

    double x_right(long i, double y) const override {
        double lo = 0.0, hi = 0.0;
        base_->strip_bounds(i, y, lo, hi);
        return hi;
    }

    void strip_bounds(long i, double x, double& y_bot, double& y_top) const override {
        y_bot = base_->x_left(i, x);
        y_top = base_->x_right(i, x);
    }

    std::string branch_label(long i) const override { return base_->branch_label(i); }

private:
    std::shared_ptr<const MapFamily> base_;
};

}  // namespace

PiecewiseMap reversed_map(const PiecewiseMap& map) {
    return {std::make_shared<SwappedInverseFamily>(map.fam), map.cone, map.C0};
}

// --- manifold iteration -------------------------------------------------------

namespace {

// Rewrites a backward word over the power family's composite alphabet,
// grouping from the recent end and dropping the oldest remainder.
std::vector<long> compress_past(const PiecewiseMap& pow_map, const std::vector<long>& p,
                                int power) {
    const auto* pf = dynamic_cast<const PowerFamily*>(&pow_map.f());
    const long groups = static_cast<long>(p.size()) / power;
    if (groups < 1)
        fail(Err::InsufficientPast, "past shorter than one power block");
    const long skip = static_cast<long>(p.size()) - groups * power;
    std::vector<long> q;
    q.reserve(static_cast<std::size_t>(groups));
    for (long gi = 0; gi < groups; ++gi) {
        const auto first = p.begin() + skip + gi * power;
        std::vector<long> tuple(first, first + power);
        for (long s : tuple)
            if (s > pf->alphabet())
                fail(Err::TailTruncated,
                     "symbol " + std::to_string(s) + " exceeds the power alphabet");
        q.push_back(pf->id_of(tuple));
    }
    return q;
}

}  // namespace

ManifoldResult unstable_manifold(const PiecewiseMap& map, const Itinerary& past, double tol,
                                 long max_iter, int n_grid, int power) {
    past.validate();
    if (past.orientation != Orientation::Backward)
        fail(Err::InvalidArgument, "unstable manifold needs a backward itinerary");
    if (!(tol > 0.0) || max_iter < 2 || n_grid < 2 || power < 1)
        fail(Err::InvalidArgument, "bad manifold iteration parameters");

    PiecewiseMap work = map;
    std::vector<long> p = past.symbols;
    if (power > 1) {
        work = power_map(map, power);
        p = compress_past(work, p, power);
    }
    require_backward_word(work, p);
    const long n = static_cast<long>(p.size());
    if (n < 2)
        fail(Err::InsufficientPast, "need at least two symbols to certify convergence");

    std::vector<long> uniq(p);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    TransformDiagnostics diag;
    diag.tol = tol;
    diag.budget = curvature_budget(work, uniq);
    const double alpha = work.cone.alpha;
    const double curvature_cap = diag.budget.k2 * (1.0 + 1e-6) + 1e-9;

    // Relocalized forward tracer: tracer[k] is its height before symbol k.
    std::vector<double> tracer(static_cast<std::size_t>(n) + 1);
    tracer[0] = 0.5;
    {
        double y = 0.5;
        for (long k = 0; k < n; ++k) {
            const long b = p[static_cast<std::size_t>(k)];
            const double xl = work.f().x_left(b, y);
            const double xr = work.f().x_right(b, y);
            y = std::clamp(work.f().forward(b, {0.5 * (xl + xr), y}).y, 0.0, 1.0);
            tracer[static_cast<std::size_t>(k) + 1] = y;
        }
    }

    CurveGraph prev, result;
    bool have_prev = false;
    const long iter_cap = std::min(n, max_iter);
    for (long m = 1; m <= iter_cap; ++m) {
        const double seed = tracer[static_cast<std::size_t>(n - m)];
        diag.seeds.push_back(seed);
        CurveGraph cur = CurveGraph::constant(seed, n_grid);
        for (long k = n - m; k < n; ++k) {
            cur = apply_graph_transform(work.f(), p[static_cast<std::size_t>(k)], cur, n_grid);
            for (int gi = 0; gi < cur.n(); ++gi) {
                const auto ii = static_cast<std::size_t>(gi);
                if (std::fabs(cur.dg[ii]) > alpha + 1e-9)
                    fail(Err::ConeEscape, "transported slope left the invariant cone");
                if (std::fabs(cur.d2g[ii]) > curvature_cap)
                    fail(Err::ContractionViolated,
                         "transported curvature left its invariant ball");
            }
        }
        ++diag.iterations;
        if (have_prev) {
            const CurveDistance d = curve_distance(cur, prev);
            if (!diag.d0.empty() && diag.d0.back() > 0.0)
                diag.d0_ratio.push_back(d.d0 / diag.d0.back());
            diag.d0.push_back(d.d0);
            diag.d1.push_back(d.d1);
            diag.d2.push_back(d.d2);
            if (d.d0 <= tol && d.d1 <= tol && d.d2 <= tol) {
                diag.converged = true;
                result = std::move(cur);
                break;
            }
        }
        prev = std::move(cur);
        have_prev = true;
    }
    if (!diag.converged) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "manifold iteration left d0=%.3e d1=%.3e d2=%.3e above tol=%.1e "
                      "after %ld chains; supply a longer past or larger max_iter",
                      diag.d0.empty() ? 1.0 : diag.d0.back(),
                      diag.d1.empty() ? 1.0 : diag.d1.back(),
                      diag.d2.empty() ? 1.0 : diag.d2.back(), tol, diag.iterations);
        fail(Err::NotConverged, buf);
    }
    return {std::move(result), std::move(diag)};
}

ManifoldResult stable_manifold(const PiecewiseMap& map, const Itinerary& future, double tol,
                               long max_iter, int n_grid, int power) {
    future.validate();
    if (future.orientation != Orientation::Forward)
        fail(Err::InvalidArgument, "stable manifold needs a forward itinerary");
    Itinerary reversed;
    reversed.orientation = Orientation::Backward;
    reversed.symbols.assign(future.symbols.rbegin(), future.symbols.rend());
    return unstable_manifold(reversed_map(map), reversed, tol, max_iter, n_grid, power);
}

CurveDistance manifold_continuity(const PiecewiseMap& map, const Itinerary& past1,
                                  const Itinerary& past2, double tol, long max_iter,
                                  int n_grid) {
    const auto a = unstable_manifold(map, past1, tol, max_iter, n_grid);
    const auto b = unstable_manifold(map, past2, tol, max_iter, n_grid);
    return curve_distance(a.curve, b.curve);
}

}  // namespace srblab
