// Expression-defined map families. One parametrized branch description (the
// variable n is the branch index) supplies the forward components, every
// first and second partial, and the post boundary curves; no automatic
// differentiation happens anywhere, the config is the authority on jets.
#pragma once

#include <string>

#include "srblab/family.hpp"

namespace srblab {

struct ExprFamilyConfig {
    std::string label = "custom";
    long n_max = 2;                // branch count / enumeration cap
    bool affine = false;           // exact-affine declaration (fast paths)
    bool disjoint_strips = false;  // required by the integral entropy route

    // Boundary curves as functions of (y, n).
    std::string x_left, x_right;

    // Forward components and partials as functions of (x, y, n).
    std::string f1, f2;
    std::string f1x, f1y, f2x, f2y;
    std::string f1xx, f1xy, f1yy, f2xx, f2xy, f2yy;
};

PiecewiseMap custom_family(const ExprFamilyConfig& cfg, ConeParams cone,
                           double C0 = 1.0);

} // namespace srblab
