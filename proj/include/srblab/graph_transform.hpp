// Graph-transform engine: pushing a curve graph through one branch of the
// map, transporting first and second derivative data along, and iterating
// over a backward itinerary to produce C^2 unstable manifolds. Stable
// manifolds reuse the same engine on the coordinate-swapped inverse family.
#pragma once

#include <vector>

#include "srblab/curve.hpp"
#include "srblab/family.hpp"
#include "srblab/symbolic.hpp"

namespace srblab {

// Solves f1(u, g(u)) = x for u over the post of the given branch. The base
// function is strictly monotone on the post, so a safeguarded Newton search
// on the bracketing interval always lands with residual below 1e-12. Throws
// OutOfImage when x lies outside the branch's base image.
double invert_base(const MapFamily& fam, long branch, const CurveGraph& g, double x);

// Slope transported through one branch: (f2x + f2y h) / (f1x + f1y h) at the
// jet's base point. Throws ContractionViolated when the result leaves the
// unit ball by more than 1e-9.
double transport_slope(const Jet& j, double h);

// Curvature transported through one branch, given slope h and curvature jc of
// the source curve at the jet's base point.
double transport_curvature(const Jet& j, double h, double jc);

// One application of the graph transform: the image of graph(g) under the
// branch, restricted to the unit interval, with slope and curvature fields
// transported alongside the values.
CurveGraph apply_graph_transform(const MapFamily& fam, long branch, const CurveGraph& g,
                                 int n_out = 0);

// Curvature budget of the branches an iteration will traverse, sampled on a
// per-post grid. a1/a2 are the affine-control coefficients of the curvature
// transport (|R2| <= a1 + a2 |J|); k2 = 1.05 a1 / (1 - a2) (with a small
// floor) is the invariant curvature ball; the slacks must all be positive for
// the transport to contract:
//   slope_budget_slack      1 - (e21 + e22) / (1 - e12)
//   curvature_feedback_slack 1 - a2
//   curvature_ball_slack    k2 (1 - a2) - a1
// where e12 = |f1y|/|f1x|, e21 = |f2x|/|f1x|, e22 = |f2y|/|f1x|.
struct CurvatureBudget {
    double a1 = 0.0;
    double a2 = 0.0;
    double k2 = 0.0;
    double slope_budget_slack = 0.0;
    double curvature_feedback_slack = 0.0;
    double curvature_ball_slack = 0.0;
};

CurvatureBudget curvature_budget(const PiecewiseMap& map, const std::vector<long>& branches,
                                 int samples = 16);

struct TransformDiagnostics {
    std::vector<double> d0, d1, d2;  // sup-distances between successive depth chains
    std::vector<double> d0_ratio;    // empirical contraction factors of d0
    long iterations = 0;
    bool converged = false;
    double tol = 0.0;
    CurvatureBudget budget;
    std::vector<double> seeds;  // constant seed value used by each chain
};

struct ManifoldResult {
    CurveGraph curve;
    TransformDiagnostics diag;
};

// Unstable manifold of a backward itinerary: iterates the graph transform
// along ever deeper suffix chains of the past, seeding each chain with the
// constant curve at the relocalized forward tracer's height, until successive
// chains agree to tol in value, slope, and curvature. With power > 1 the
// iteration runs on the t-step power family (the past length must supply at
// least one full power block). Throws NotConverged when the past or max_iter
// is exhausted first; ContractionViolated and ConeEscape propagate.
ManifoldResult unstable_manifold(const PiecewiseMap& map, const Itinerary& past,
                                 double tol = 1e-10, long max_iter = 64, int n_grid = 257,
                                 int power = 1);

// Stable manifold of a forward itinerary, computed as the unstable manifold
// of the coordinate-swapped inverse family along the reversed future. The
// returned curve reads x as a function of y: its abscissa is the height y and
// its value the horizontal position x(y).
ManifoldResult stable_manifold(const PiecewiseMap& map, const Itinerary& future,
                               double tol = 1e-10, long max_iter = 64, int n_grid = 257,
                               int power = 1);

// The coordinate-swapped inverse family as a map of the same kind: branch i
// sends swap(S_i) onto swap(E_i) by w -> swap(f_i^{-1}(swap w)). Hyperbolic
// whenever the original map is, with the cone roles exchanged.
PiecewiseMap reversed_map(const PiecewiseMap& map);

// Sup-distances between the unstable manifolds of two pasts, over the shared
// full-width domain.
CurveDistance manifold_continuity(const PiecewiseMap& map, const Itinerary& past1,
                                  const Itinerary& past2, double tol = 1e-10,
                                  long max_iter = 64, int n_grid = 257);

}  // namespace srblab
