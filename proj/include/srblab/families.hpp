// Built-in map families.
//
//   baker(N)               N affine branches on posts [(i-1)/N, i/N), each
//                          expanding x by N and stacking strips of height 1/N.
//   lueroth()              countably many affine branches; branch n lives on
//                          the post (1/(n+1), 1/n], expands by n(n+1), and
//                          lands on the strip [1-1/n, 1-1/(n+1)]. Unit
//                          Jacobian, so Lebesgue measure is invariant.
//   perturbed_lueroth(eps) the lueroth partition pulled back through the
//                          shear psi(x,y) = x + eps*p(x,y) and sheared
//                          vertically through h(x,y) = y + eps*q(x,y); a
//                          genuinely nonlinear family with curved posts,
//                          exact tiling and closed-form second-order jets.
//
// Custom expression-defined families live in expr_family.hpp.
#pragma once

#include "srblab/family.hpp"

namespace srblab {

// Distance-to-boundary threshold below which lookups flag boundary_adjacent.
inline constexpr double kBoundaryTol = 1e-12;

PiecewiseMap baker(int branches, ConeParams cone = {0.5, 2.0});

PiecewiseMap lueroth(long n_max = 100000000L, ConeParams cone = {0.5, 2.0});

PiecewiseMap perturbed_lueroth(double eps, long n_max = 1000000L,
                               ConeParams cone = {0.5, 1.9});

} // namespace srblab
