// Small numerical solvers used across modules: a safeguarded Newton iteration
// (bisection fallback, guaranteed bracket), plain bisection on a predicate
// boundary, and a 2x2 linear solve.
#pragma once

#include <cmath>
#include <functional>

#include "srblab/error.hpp"

namespace srblab {

// Root of f on [lo,hi]; f(lo) and f(hi) must straddle zero (a small slack is
// tolerated at the endpoints). Newton steps from the midpoint, falling back
// to bisection whenever a step leaves the bracket or stalls.
template <class F, class DF>
double newton_bisect(F&& f, DF&& df, double lo, double hi, double tol,
                     int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) {
        // Accept a near-root endpoint; otherwise the bracket is invalid.
        const double slack = 64.0 * tol;
        if (std::fabs(flo) <= std::fabs(fhi) && std::fabs(flo) < slack)
            return lo;
        if (std::fabs(fhi) < slack) return hi;
        fail(Err::OutOfImage, "newton_bisect: no sign change on bracket");
    }
    if (flo > 0.0) { std::swap(lo, hi); std::swap(flo, fhi); }

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (std::fabs(fx) < tol) return x;
        if (fx < 0.0) lo = x; else hi = x;

        const double d = df(x);
        double next = (d != 0.0) ? x - fx / d : x;
        const double a = std::fmin(lo, hi), b = std::fmax(lo, hi);
        if (!(next > a && next < b)) next = 0.5 * (lo + hi);
        if (next == x) next = 0.5 * (lo + hi);
        x = next;
        if (std::fabs(hi - lo) < 0.25 * tol) return 0.5 * (lo + hi);
    }
    return x;
}

// Bisection for the boundary of a monotone predicate: returns x such that
// pred holds on one side within xtol. pred(lo) and pred(hi) must differ.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double xtol,
                        int max_iter = 200) {
    bool plo = pred(lo);
    if (plo == pred(hi))
        fail(Err::OutOfImage, "bisect_predicate: predicate constant on bracket");
    for (int it = 0; it < max_iter && std::fabs(hi - lo) > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid) == plo) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Solve [[a,b],[c,d]] (x,y)^T = (r1,r2)^T.
inline void solve2x2(double a, double b, double c, double d, double r1,
                     double r2, double& x, double& y) {
    const double det = a * d - b * c;
    if (det == 0.0) fail(Err::InvalidArgument, "solve2x2: singular matrix");
    x = (r1 * d - r2 * b) / det;
    y = (a * r2 - c * r1) / det;
}

} // namespace srblab
