// Graph-transform engine tests. Affine families give exact closed-form
// oracles for the base inversion, the transported fields, and the manifold
// limits; the nonlinear family is checked against finite differences of the
// transform written out as a plain scalar function, against pushed-forward
// point clouds, and against the shift invariance that defines the manifolds.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "srblab/curve.hpp"
#include "srblab/error.hpp"
#include "srblab/families.hpp"
#include "srblab/graph_transform.hpp"
#include "srblab/rng.hpp"
#include "srblab/solve.hpp"
#include "srblab/symbolic.hpp"

using namespace srblab;

namespace {

Itinerary backward(std::vector<long> syms) {
    Itinerary it;
    it.symbols = std::move(syms);
    it.orientation = Orientation::Backward;
    return it;
}

Itinerary forward_word(std::vector<long> syms) {
    Itinerary it;
    it.symbols = std::move(syms);
    it.orientation = Orientation::Forward;
    return it;
}

std::vector<long> random_symbols(long n, long max_symbol, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 0; k < n; ++k)
        out.push_back(1 + static_cast<long>(rng.raw(9, static_cast<std::uint64_t>(k)) %
                                            static_cast<std::uint64_t>(max_symbol)));
    return out;
}

// Horizontal extent of a post over all heights.
std::pair<double, double> extent(const MapFamily& fam, long branch) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k <= 32; ++k) {
        const double y = k / 32.0;
        lo = std::min(lo, fam.x_left(branch, y));
        hi = std::max(hi, fam.x_right(branch, y));
    }
    return {lo, hi};
}

}  // namespace

TEST_CASE("base inversion hits closed-form preimages") {
    const auto bk = baker(2);
    const auto lu = lueroth();
    const CurveGraph flat = CurveGraph::constant(0.5);

    // baker branch 1: f1 = 2u, so u = x/2.
    CHECK(std::fabs(invert_base(bk.f(), 1, flat, 0.8) - 0.4) < 1e-12);
    // lueroth branch 3: f1 = 12u - 3, so u = (x + 3)/12.
    CHECK(std::fabs(invert_base(lu.f(), 3, flat, 0.5) - 7.0 / 24.0) < 1e-12);
    CHECK(std::fabs(invert_base(lu.f(), 1, flat, 0.0) - 0.5) < 1e-12);

    // Nonlinear branches: verify by the residual of the base equation.
    const auto pl = perturbed_lueroth(0.01);
    const CurveGraph tilted = [] {
        CurveGraph g = CurveGraph::constant(0.4);
        for (int k = 0; k < g.n(); ++k) {
            const double t = g.x_at(k);
            g.g[static_cast<std::size_t>(k)] = 0.4 + 0.05 * std::sin(3.0 * t);
            g.dg[static_cast<std::size_t>(k)] = 0.15 * std::cos(3.0 * t);
            g.d2g[static_cast<std::size_t>(k)] = -0.45 * std::sin(3.0 * t);
        }
        return g;
    }();
    for (double x : {0.1, 0.5, 0.9}) {
        const double u = invert_base(pl.f(), 2, tilted, x);
        CHECK(std::fabs(pl.f().forward(2, {u, tilted.value(u)}).x - x) < 1e-12);
    }

    // Targets outside the branch image have no preimage.
    CHECK_THROWS_AS(invert_base(bk.f(), 1, flat, 1.5), SrbError);
}

TEST_CASE("transported fields match closed forms on affine branches") {
    const auto bk = baker(2);
    const auto lu = lueroth();

    // baker: f2y = 1/2, f1x = 2, everything else zero.
    const Jet jb = jet_at(bk, 1, {0.3, 0.4});
    CHECK(std::fabs(transport_slope(jb, 0.5) - 0.125) < 1e-15);
    CHECK(transport_slope(jb, 0.0) == 0.0);
    CHECK(std::fabs(transport_curvature(jb, 0.5, 0.8) - 0.5 * 0.8 / 4.0) < 1e-15);
    CHECK(transport_curvature(jb, 0.5, 0.0) == 0.0);

    // lueroth branch 3: f1x = 12, f2y = 1/12.
    const Jet jl = jet_at(lu, 3, {0.3, 0.4});
    CHECK(std::fabs(transport_slope(jl, 0.3) - 0.3 / 144.0) < 1e-16);

    // A slope that the branch would expand past 1 is a contraction failure.
    Jet bad;
    bad.value = {0.0, 0.0};
    bad.d1[0][0] = 1.0;
    bad.d1[1][0] = 2.0;
    CHECK_THROWS_AS(transport_slope(bad, 0.0), SrbError);
}

TEST_CASE("one transform of a constant curve lands on the affine strip line") {
    const auto bk = baker(2);
    const CurveGraph g = CurveGraph::constant(0.3);

    const CurveGraph t1 = apply_graph_transform(bk.f(), 1, g);
    const CurveGraph t2 = apply_graph_transform(bk.f(), 2, g);
    for (int k = 0; k < t1.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(std::fabs(t1.g[i] - 0.15) < 1e-15);
        CHECK(std::fabs(t2.g[i] - 0.65) < 1e-15);
        CHECK(t1.dg[i] == 0.0);
        CHECK(t1.d2g[i] == 0.0);
    }

    const auto lu = lueroth();
    const CurveGraph c2 = CurveGraph::constant(0.2);
    const CurveGraph t3 = apply_graph_transform(lu.f(), 3, c2);
    for (int k = 0; k < t3.n(); ++k)
        CHECK(std::fabs(t3.g[static_cast<std::size_t>(k)] - (2.0 / 3.0 + 0.2 / 12.0)) < 1e-15);
}

TEST_CASE("nonlinear transform values match a pushed-forward point cloud") {
    const auto pl = perturbed_lueroth(0.01);
    const CurveGraph g = CurveGraph::constant(0.4);
    const CurveGraph out = apply_graph_transform(pl.f(), 2, g);

    const double xl = pl.f().x_left(2, 0.4);
    const double xr = pl.f().x_right(2, 0.4);
    for (int k = 0; k < 1000; ++k) {
        const double t = xl + (k + 0.5) / 1000.0 * (xr - xl);
        const Point2 img = pl.f().forward(2, {t, 0.4});
        CHECK(std::fabs(out.value(img.x) - img.y) < 1e-8);
    }
}

TEST_CASE("transported slope and curvature match finite differences") {
    const auto pl = perturbed_lueroth(0.01);
    const long branch = 2;
    const auto [tl, tr] = extent(pl.f(), branch);

    // An analytic source curve keeps the comparison free of interpolation
    // noise: F(x) = f2(u(x), g(u(x))) with f1(u, g(u)) = x is a plain smooth
    // scalar function whose derivatives the transports must reproduce.
    const auto gv = [](double t) { return 0.4 + 0.05 * std::sin(3.0 * t); };
    const auto gd = [](double t) { return 0.15 * std::cos(3.0 * t); };
    const auto gdd = [](double t) { return -0.45 * std::sin(3.0 * t); };
    const auto F = [&](double x) {
        const auto base = [&](double t) { return pl.f().forward(branch, {t, gv(t)}).x - x; };
        const auto dbase = [&](double t) {
            const Jet j = pl.f().jet(branch, {t, gv(t)});
            return j.f1x() + j.f1y() * gd(t);
        };
        const double u = newton_bisect(base, dbase, tl, tr, 1e-14);
        return std::pair<double, double>{u, pl.f().forward(branch, {u, gv(u)}).y};
    };

    for (double x : {0.25, 0.5, 0.75}) {
        const double u = F(x).first;
        const Jet j = pl.f().jet(branch, {u, gv(u)});
        const double slope = transport_slope(j, gd(u));
        const double curv = transport_curvature(j, gd(u), gdd(u));

        const double h1 = 1e-5;
        const double fd1 = (F(x + h1).second - F(x - h1).second) / (2.0 * h1);
        CHECK(std::fabs(slope - fd1) < 1e-6);

        const double h2 = 3e-4;
        const double fd2 =
            (F(x + h2).second - 2.0 * F(x).second + F(x - h2).second) / (h2 * h2);
        CHECK(std::fabs(curv - fd2) < 1e-4);
    }
}

TEST_CASE("grid fields of a transformed curve are internally consistent") {
    // One transform of a constant curve is analytic, so nodal finite
    // differences of the value column must reproduce the transported slope
    // and curvature columns.
    const auto pl = perturbed_lueroth(0.01);
    const CurveGraph out = apply_graph_transform(pl.f(), 3, CurveGraph::constant(0.4));
    const double h = out.spacing();
    for (int k = 2; k < out.n() - 2; k += 5) {
        const auto i = static_cast<std::size_t>(k);
        const double fd1 = (out.g[i + 1] - out.g[i - 1]) / (2.0 * h);
        const double fd2 = (out.g[i + 1] - 2.0 * out.g[i] + out.g[i - 1]) / (h * h);
        CHECK(std::fabs(out.dg[i] - fd1) < 1e-6);
        CHECK(std::fabs(out.d2g[i] - fd2) < 1e-4);
    }
}

TEST_CASE("curvature budget has closed form on baker and sane shape elsewhere") {
    const auto bk = baker(2);
    const CurvatureBudget b = curvature_budget(bk, {1, 2});
    CHECK(b.a1 == 0.0);
    CHECK(std::fabs(b.a2 - 0.125) < 1e-15);
    CHECK(b.k2 == 1e-9);
    CHECK(std::fabs(b.slope_budget_slack - 0.75) < 1e-15);
    CHECK(std::fabs(b.curvature_feedback_slack - 0.875) < 1e-15);
    CHECK(b.curvature_ball_slack > 0.0);

    const auto pl = perturbed_lueroth(0.01);
    const CurvatureBudget p = curvature_budget(pl, {1, 2, 3, 4, 5});
    CHECK(p.a1 > 0.0);
    CHECK(p.a2 > 0.0);
    CHECK(p.a2 < 1.0);
    CHECK(std::fabs(p.k2 - 1.05 * p.a1 / (1.0 - p.a2)) <= 1e-12 * p.k2);
    CHECK(p.slope_budget_slack > 0.0);
    CHECK(p.curvature_ball_slack > 0.0);
}

TEST_CASE("affine unstable manifolds are exact horizontal lines") {
    const auto bk = baker(2);
    const auto r1 = unstable_manifold(bk, backward(std::vector<long>(45, 1)));
    CHECK(r1.diag.converged);
    CHECK(r1.diag.iterations <= 3);
    REQUIRE(!r1.diag.d0.empty());
    CHECK(r1.diag.d0.back() <= 1e-12);
    for (int k = 0; k < r1.curve.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(std::fabs(r1.curve.g[i]) <= 1e-12);  // limit line is y = 0
        CHECK(r1.curve.dg[i] == 0.0);
        CHECK(r1.curve.d2g[i] == 0.0);
    }

    const auto lu = lueroth();
    const auto r3 = unstable_manifold(lu, backward(std::vector<long>(45, 3)));
    CHECK(r3.diag.converged);
    CHECK(r3.diag.iterations <= 3);
    for (int k = 0; k < r3.curve.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(std::fabs(r3.curve.g[i] - 8.0 / 11.0) <= 1e-12);
        CHECK(r3.curve.dg[i] == 0.0);
        CHECK(r3.curve.d2g[i] == 0.0);
    }
}

TEST_CASE("mixed affine past reproduces the digit-expansion height") {
    const auto bk = baker(2);
    const std::vector<long> p = random_symbols(40, 2, 21);
    const auto r = unstable_manifold(bk, backward(p));
    CHECK(r.diag.converged);
    CHECK(r.diag.iterations == 2);
    CHECK(r.diag.d0.back() <= 1e-15);

    // Applying branch i sends y to (y + i - 1)/2, so the manifold height is
    // the binary number written by the past, most recent symbol first.
    double y = 0.5;
    for (long s : p) y = (y + static_cast<double>(s - 1)) / 2.0;
    CHECK(std::fabs(r.curve.value(0.37) - y) < 1e-14);
}

TEST_CASE("nonlinear manifold converges, stays in bounds, and is invariant") {
    const auto pl = perturbed_lueroth(0.005);
    std::vector<long> p = random_symbols(40, 5, 33);

    const auto full = unstable_manifold(pl, backward(p));
    CHECK(full.diag.converged);
    CHECK(full.diag.iterations <= 40);
    const double cap = full.diag.budget.k2 * (1.0 + 2e-6);
    for (int k = 0; k < full.curve.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(std::fabs(full.curve.dg[i]) <= pl.cone.alpha + 1e-9);
        CHECK(std::fabs(full.curve.d2g[i]) <= cap);
    }

    // Empirical contraction of the chain distances stays below 1/K0 + 0.05.
    REQUIRE(full.diag.d0_ratio.size() >= 3);
    for (std::size_t k = 0; k + 1 < full.diag.d0.size(); ++k) {
        if (full.diag.d0[k] < 1e-13) continue;
        CHECK(full.diag.d0_ratio[k] <= 1.0 / pl.cone.K0 + 0.05);
    }

    // Shift invariance: the manifold of the shortened past, pushed through
    // the dropped branch, is the manifold of the full past.
    const long last = p.back();
    p.pop_back();
    const auto shorter = unstable_manifold(pl, backward(p));
    const CurveGraph pushed = apply_graph_transform(pl.f(), last, shorter.curve);
    const CurveDistance d = curve_distance(pushed, full.curve);
    CHECK(d.d0 < 1e-6);
    CHECK(d.d1 < 1e-5);
}

TEST_CASE("converged nonlinear manifold passes nodal derivative checks") {
    const auto pl = perturbed_lueroth(0.005);
    const auto r = unstable_manifold(pl, backward(random_symbols(40, 4, 57)));
    const double h = r.curve.spacing();
    for (int k = 1; k < r.curve.n() - 1; k += 7) {
        const auto i = static_cast<std::size_t>(k);
        const double fd1 = (r.curve.g[i + 1] - r.curve.g[i - 1]) / (2.0 * h);
        const double fd2 = (r.curve.g[i + 1] - 2.0 * r.curve.g[i] + r.curve.g[i - 1]) / (h * h);
        CHECK(std::fabs(r.curve.dg[i] - fd1) < 1e-6);
        CHECK(std::fabs(r.curve.d2g[i] - fd2) < 1e-4);
    }
    CHECK_NOTHROW(r.curve.check_bounds(pl.cone.alpha, r.diag.budget.k2 * 1.0001));
}

TEST_CASE("reversed baker(2) is the same map") {
    const auto bk = baker(2);
    const auto rev = reversed_map(bk);
    CHECK(rev.f().max_branch() == 2);
    const auto pts = testutil::interior_points(bk, 12, 5);
    for (const Point2& z : pts) {
        const long i = bk.f().locate(z).index;
        const Point2 a = bk.f().forward(i, z);
        const Point2 b = rev.f().forward(i, z);
        CHECK(std::fabs(a.x - b.x) < 1e-12);
        CHECK(std::fabs(a.y - b.y) < 1e-12);
        const Jet ja = bk.f().jet(i, z);
        const Jet jb = rev.f().jet(i, z);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) CHECK(std::fabs(ja.d1[r][c] - jb.d1[r][c]) < 1e-10);
    }
}

TEST_CASE("reversed-family jets agree with finite differences") {
    const auto pl = perturbed_lueroth(0.01);
    const auto rev = reversed_map(pl);
    const auto pts = testutil::interior_points(rev, 8, 11);
    for (const Point2& w : pts) {
        const long i = rev.f().locate(w).index;
        const Jet ja = rev.f().jet(i, w);
        const Jet jf = testutil::fd_jet(rev.f(), i, w);
        CHECK(std::fabs(ja.value.x - jf.value.x) < 1e-12);
        CHECK(std::fabs(ja.value.y - jf.value.y) < 1e-12);
        // The finite-difference oracle's truncation error scales with the
        // derivative magnitudes, which reach O(20) on deeper branches.
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                CHECK(testutil::close_rel(ja.d1[r][c], jf.d1[r][c], 1e-6));
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c)
                CHECK(testutil::close_rel(ja.d2[r][c], jf.d2[r][c], 1e-4));
    }

    // Round trip through the reversed branch returns to the start.
    for (const Point2& w : pts) {
        const long i = rev.f().locate(w).index;
        const Point2 img = rev.f().forward(i, w);
        const Point2 back = rev.f().inverse(i, img);
        CHECK(std::fabs(back.x - w.x) < 1e-10);
        CHECK(std::fabs(back.y - w.y) < 1e-10);
    }
}

TEST_CASE("affine stable manifolds are exact vertical lines") {
    const auto bk = baker(2);
    const auto s1 = stable_manifold(bk, forward_word(std::vector<long>(45, 1)));
    CHECK(s1.diag.converged);
    CHECK(s1.diag.iterations <= 3);
    for (int k = 0; k < s1.curve.n(); ++k)
        CHECK(std::fabs(s1.curve.g[static_cast<std::size_t>(k)]) <= 1e-12);

    // Branch 3 of lueroth fixes x = 3/11, the root of 12x - 3 = x.
    const auto lu = lueroth();
    const auto s3 = stable_manifold(lu, forward_word(std::vector<long>(45, 3)));
    CHECK(s3.diag.converged);
    CHECK(s3.diag.iterations <= 3);
    CHECK(s3.diag.d0.back() <= 1e-13);
    for (int k = 0; k < s3.curve.n(); ++k) {
        const auto i = static_cast<std::size_t>(k);
        CHECK(std::fabs(s3.curve.g[i] - 3.0 / 11.0) <= 1e-12);
        CHECK(std::fabs(s3.curve.dg[i]) <= 1e-12);
    }
}

TEST_CASE("stable and unstable manifolds cross at the coded point") {
    const auto pl = perturbed_lueroth(0.005);
    const Itinerary past = backward(random_symbols(40, 5, 71));
    const Itinerary future = forward_word(random_symbols(12, 5, 72));

    const auto wu = unstable_manifold(pl, past);
    const auto ws = stable_manifold(pl, future);

    // Alternate between the two graphs; the cone gap makes this contract.
    double x = 0.5, y = 0.5;
    for (int k = 0; k < 60; ++k) {
        y = wu.curve.value(x);
        x = ws.curve.value(y);
    }
    CHECK(std::fabs(wu.curve.value(x) - y) < 1e-10);

    const CodedPoint cp = point_from_itinerary(pl, past, future, 10);
    CHECK(std::fabs(cp.z.x - x) <= cp.residual + 1e-6);
    CHECK(std::fabs(cp.z.y - y) <= cp.residual + 1e-6);
}

TEST_CASE("manifolds vary continuously in the past") {
    const auto bk = baker(2);
    std::vector<long> a = random_symbols(45, 2, 91);
    std::vector<long> b = a;

    // Identical pasts give identical curves.
    const CurveDistance same = manifold_continuity(bk, backward(a), backward(b));
    CHECK(same.d0 == 0.0);

    // Flipping one symbol at depth 25 moves the height by exactly 2^-25.
    b[45 - 25] = (b[45 - 25] == 1) ? 2 : 1;
    const CurveDistance one = manifold_continuity(bk, backward(a), backward(b));
    CHECK(std::fabs(one.d0 - std::pow(2.0, -25)) < 1e-14);

    // Nonlinear family: agreement on a longer recent block brings the
    // manifolds closer at the hyperbolic rate.
    const auto pl = perturbed_lueroth(0.005);
    const std::vector<long> pref1 = random_symbols(35, 4, 93);
    const std::vector<long> pref2 = random_symbols(35, 4, 94);
    const std::vector<long> shared = random_symbols(14, 4, 95);
    double prev = 1e9;
    for (long n : {6L, 10L, 14L}) {
        std::vector<long> pa = pref1, pb = pref2;
        pa.insert(pa.end(), shared.end() - n, shared.end());
        pb.insert(pb.end(), shared.end() - n, shared.end());
        const CurveDistance d =
            manifold_continuity(pl, backward(pa), backward(pb), 1e-7, 64, 65);
        CHECK(d.d0 <= 2.0 * std::pow(1.0 / pl.cone.K0, static_cast<double>(n)));
        CHECK(d.d0 <= prev + 1e-12);
        prev = d.d0;
    }
}

TEST_CASE("power blocks reproduce the single-step manifold") {
    const auto bk = baker(2);
    const std::vector<long> p = random_symbols(12, 2, 101);
    const auto one = unstable_manifold(bk, backward(p));
    const auto two = unstable_manifold(bk, backward(p), 1e-10, 64, 257, 2);
    CHECK(two.diag.converged);
    const CurveDistance d = curve_distance(one.curve, two.curve);
    CHECK(d.d0 <= 1e-14);

    const auto pl = perturbed_lueroth(0.005);
    const std::vector<long> q = random_symbols(40, 4, 103);
    const auto p1 = unstable_manifold(pl, backward(q));
    const auto p2 = unstable_manifold(pl, backward(q), 1e-10, 64, 257, 2);
    CHECK(p2.diag.converged);
    CHECK(curve_distance(p1.curve, p2.curve).d0 <= 1e-8);
}

TEST_CASE("manifold error paths") {
    const auto bk = baker(2);
    const auto pl = perturbed_lueroth(0.005);

    // Wrong orientation.
    const Itinerary fwd = forward_word({1, 2, 1});
    CHECK_THROWS_AS(unstable_manifold(bk, fwd), SrbError);
    const Itinerary bwd = backward({1, 2, 1});
    CHECK_THROWS_AS(stable_manifold(bk, bwd), SrbError);

    // Too little history to certify anything.
    const Itinerary tiny = backward({1});
    CHECK_THROWS_AS(unstable_manifold(bk, tiny), SrbError);
    try {
        unstable_manifold(bk, tiny);
        CHECK(false);
    } catch (const SrbError& e) {
        CHECK(e.code() == Err::InsufficientPast);
    }

    // A short nonlinear past cannot reach a 1e-10 agreement.
    try {
        unstable_manifold(pl, backward(random_symbols(6, 4, 111)));
        CHECK(false);
    } catch (const SrbError& e) {
        CHECK(e.code() == Err::NotConverged);
    }

    // Power blocks need at least one full block of history.
    try {
        unstable_manifold(bk, backward({1, 2, 1, 1}), 1e-10, 64, 257, 5);
        CHECK(false);
    } catch (const SrbError& e) {
        CHECK(e.code() == Err::InsufficientPast);
    }

    // Symbols outside the family's branch range.
    const Itinerary big = backward({1, 3, 1, 1});
    CHECK_THROWS_AS(unstable_manifold(bk, big), SrbError);
}
