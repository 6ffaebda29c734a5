// Conditional measures on unstable manifolds, the two empirical SRB
// estimators, the holonomy comparison, and the chi-square helper.

#include "srblab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "orbit_util.hpp"
#include "srblab/graph_transform.hpp"
#include "srblab/rng.hpp"

namespace srblab {

namespace {

using detail::CompensatedSum;
using detail::dithered;
using detail::parallel_indices;

// The manifolds of the successively shortened pasts, oldest first:
// curves[0] belongs to the past with the most recent `depth` symbols removed,
// and applying recent[s] to curves[s] yields curves[s + 1]. The last curve is
// the manifold of the full past. Backward orbits walk down this ladder with
// contractive base inversions, so transverse error never grows.
struct BackwardChain {
    std::vector<CurveGraph> curves;
    std::vector<long> recent;

    long depth() const { return static_cast<long>(recent.size()); }
};

BackwardChain backward_chain(const PiecewiseMap& map, const Itinerary& past, long depth) {
    past.validate();
    if (past.orientation != Orientation::Backward)
        fail(Err::InvalidArgument, "the Sinai density expects a backward itinerary");
    if (depth < 1) fail(Err::InvalidArgument, "density depth must be at least 1");
    const long n = past.depth();
    if (depth > n - 2)
        fail(Err::InsufficientPast,
             "the backward chain needs depth + 2 past symbols: " + std::to_string(depth) +
                 " backward steps plus at least two leading symbols for its base manifold");

    BackwardChain ch;
    Itinerary base{{past.symbols.begin(), past.symbols.end() - depth}, Orientation::Backward};
    ch.curves.reserve(depth + 1);
    ch.curves.push_back(unstable_manifold(map, base).curve);
    ch.recent.reserve(depth);
    for (long s = n - depth; s < n; ++s) {
        ch.recent.push_back(past.symbols[s]);
        ch.curves.push_back(apply_graph_transform(map.f(), past.symbols[s], ch.curves.back()));
    }
    return ch;
}

// Abscissae of the backward orbit of (x, g(x)): xs[s] lives on
// curves[depth - s].
std::vector<double> backward_abscissae(const PiecewiseMap& map, const BackwardChain& ch,
                                       double x) {
    const long d = ch.depth();
    std::vector<double> xs(d + 1);
    xs[0] = x;
    for (long s = 1; s <= d; ++s)
        xs[s] = invert_base(map.f(), ch.recent[d - s], ch.curves[d - s], xs[s - 1]);
    return xs;
}

// log |DF(v)| at the s-th backward point, v = (1, slope of its own curve).
double log_backward_jacobian(const PiecewiseMap& map, const BackwardChain& ch, long s,
                             double xs) {
    const CurveGraph& c = ch.curves[ch.depth() - s];
    const long branch = ch.recent[ch.depth() - s];
    const Jet j = jet_at(map, branch, {xs, c.value(xs)});
    const double h = c.deriv(xs);
    return std::log(std::max(std::fabs(j.f1x() + j.f1y() * h),
                             std::fabs(j.f2x() + j.f2y() * h)));
}

// Tail bound from the last included ratio terms: backward separations decay
// like K0^{-s}, so the dropped tail is at most the geometric continuation of
// the final step, rescaled from the two steps before it in case the final
// term is anomalously small. Factor 3 for safety.
double tail_from_steps(double r1, double r2, double r3, double k0) {
    const double r = std::max(r1, std::max(r2 / k0, r3 / (k0 * k0)));
    return 3.0 * r / (k0 - 1.0);
}

void require_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        fail(Err::InvalidArgument, std::string(what) + " must lie in [0,1]");
}

int bin_index(double x, int m) {
    const int k = static_cast<int>(x * m);
    return std::min(std::max(k, 0), m - 1);
}

void observe(double obs[5], double w, Point2 z) {
    obs[0] += w * z.x;
    obs[1] += w * z.y;
    obs[2] += w * z.x * z.x;
    obs[3] += w * z.x * z.y;
    obs[4] += w * z.y * z.y;
}

double arclength(const CurveGraph& c, double a, double b) {
    const int pts = 5;
    double total = 0.0;
    double prev = std::hypot(1.0, c.deriv(a));
    for (int k = 1; k < pts; ++k) {
        const double x = a + (b - a) * k / (pts - 1);
        const double cur = std::hypot(1.0, c.deriv(x));
        total += 0.5 * (prev + cur) * (b - a) / (pts - 1);
        prev = cur;
    }
    return total;
}

}  // namespace

double unstable_jacobian(const PiecewiseMap& map, const CurveGraph& curve, double x) {
    require_unit_interval(x, "the abscissa");
    const Point2 z{x, curve.value(x)};
    const BranchLookup lk = map.f().locate(z);
    if (lk.index < 1 || lk.tail_truncated)
        fail(Err::OutOfDomain, "the point has no enumerated branch");
    const Jet j = jet_at(map, lk.index, z);
    const double h = curve.deriv(x);
    return std::max(std::fabs(j.f1x() + j.f1y() * h), std::fabs(j.f2x() + j.f2y() * h));
}

SinaiValue sinai_pair(const PiecewiseMap& map, const Itinerary& past, double x1, double x2,
                      long depth) {
    require_unit_interval(x1, "x1");
    require_unit_interval(x2, "x2");
    const BackwardChain ch = backward_chain(map, past, depth);
    const std::vector<double> a = backward_abscissae(map, ch, x1);
    const std::vector<double> b = backward_abscissae(map, ch, x2);

    CompensatedSum acc;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    for (long s = 1; s <= depth; ++s) {
        const double la = log_backward_jacobian(map, ch, s, a[s]);
        const double lb = log_backward_jacobian(map, ch, s, b[s]);
        acc.add(la - lb);
        r3 = r2;
        r2 = r1;
        r1 = std::fabs(la - lb);
    }
    return {std::exp(acc.value()), tail_from_steps(r1, r2, r3, map.cone.K0)};
}

SinaiDensity sinai_density(const PiecewiseMap& map, const Itinerary& past, double basepoint,
                           long depth) {
    require_unit_interval(basepoint, "the basepoint");
    const BackwardChain ch = backward_chain(map, past, depth);

    SinaiDensity den;
    den.curve = ch.curves.back();
    den.basepoint = basepoint;
    den.depth = depth;

    const std::vector<double> base = backward_abscissae(map, ch, basepoint);
    std::vector<double> lbase(depth + 1, 0.0);
    for (long s = 1; s <= depth; ++s) lbase[s] = log_backward_jacobian(map, ch, s, base[s]);

    const int n = den.curve.n();
    den.xi.resize(n);
    double worst1 = 0.0, worst2 = 0.0, worst3 = 0.0;
    for (int k = 0; k < n; ++k) {
        const std::vector<double> xs = backward_abscissae(map, ch, den.curve.x_at(k));
        CompensatedSum acc;
        double r1 = 0.0, r2 = 0.0, r3 = 0.0;
        for (long s = 1; s <= depth; ++s) {
            const double lk = log_backward_jacobian(map, ch, s, xs[s]);
            acc.add(lbase[s] - lk);
            r3 = r2;
            r2 = r1;
            r1 = std::fabs(lbase[s] - lk);
        }
        den.xi[k] = std::exp(acc.value());
        worst1 = std::max(worst1, r1);
        worst2 = std::max(worst2, r2);
        worst3 = std::max(worst3, r3);
        den.k6 = std::max(den.k6, std::max(den.xi[k], 1.0 / den.xi[k]));
    }
    den.tail_bound = tail_from_steps(worst1, worst2, worst3, map.cone.K0);
    return den;
}

double local_measure(const SinaiDensity& density, double a, double b) {
    const CurveGraph& c = density.curve;
    if (density.xi.size() != c.g.size())
        fail(Err::InvalidArgument, "the density grid does not match its curve");
    if (a > b) std::swap(a, b);
    a = std::max(a, c.x_lo);
    b = std::min(b, c.x_hi);
    if (!(b > a)) return 0.0;

    const double h = c.spacing();
    const auto xi_at = [&](double x) {
        const double t = (x - c.x_lo) / h;
        const int k = std::min(std::max(static_cast<int>(t), 0), c.n() - 2);
        const double f = t - k;
        return density.xi[k] * (1.0 - f) + density.xi[k + 1] * f;
    };
    const auto integrand = [&](double x) { return xi_at(x) * std::hypot(1.0, c.deriv(x)); };

    CompensatedSum total;
    for (int k = 0; k + 1 < c.n(); ++k) {
        const double lo = std::max(a, c.x_at(k));
        const double hi = std::min(b, c.x_at(k + 1));
        if (!(hi > lo)) continue;
        total.add(0.5 * (integrand(lo) + integrand(hi)) * (hi - lo));
    }
    return total.value();
}

double EmpiricalMeasure::total_mass() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

std::vector<double> EmpiricalMeasure::coarsen(int factor) const {
    if (factor < 1 || m % factor != 0)
        fail(Err::InvalidArgument, "the coarsening factor must divide the grid size");
    const int mm = m / factor;
    std::vector<double> out(static_cast<size_t>(mm) * mm, 0.0);
    for (int iy = 0; iy < m; ++iy)
        for (int ix = 0; ix < m; ++ix)
            out[static_cast<size_t>(iy / factor) * mm + ix / factor] +=
                mass[static_cast<size_t>(iy) * m + ix];
    return out;
}

std::vector<Point2> default_seeds(int count, std::uint64_t seed) {
    if (count < 1) fail(Err::InvalidArgument, "seed count must be positive");
    const CounterRng rng(seed);
    std::vector<Point2> seeds(count);
    for (int k = 0; k < count; ++k)
        seeds[k] = {rng.open(11, k, 0.02, 0.98), rng.open(12, k, 0.02, 0.98)};
    return seeds;
}

EmpiricalMeasure birkhoff_srb(const PiecewiseMap& map, const std::vector<Point2>& seeds, long n,
                              int m, long burn_in, long stride, int threads,
                              std::uint64_t dither_seed) {
    if (m < 1 || m > 4096) fail(Err::InvalidArgument, "histogram size must lie in [1, 4096]");
    if (n < 1) fail(Err::InvalidArgument, "orbit length must be positive");
    if (burn_in < 0 || burn_in >= n)
        fail(Err::InvalidArgument, "burn-in must leave at least one sampled step");
    if (stride < 1) fail(Err::InvalidArgument, "stride must be positive");
    if (seeds.empty()) fail(Err::InvalidArgument, "at least one seed is required");
    for (const Point2& z : seeds) {
        require_unit_interval(z.x, "seed x");
        require_unit_interval(z.y, "seed y");
    }

    struct SeedAccum {
        std::vector<long> counts;
        double obs[5] = {0, 0, 0, 0, 0};
        long samples = 0;
        bool dropped = false;
    };
    const long n_seeds = static_cast<long>(seeds.size());
    std::vector<SeedAccum> acc(n_seeds);
    const long bins = static_cast<long>(m) * m;
    const CounterRng drng(dither_seed);

    parallel_indices(n_seeds, threads, [&](long si) {
        SeedAccum& a = acc[si];
        a.counts.assign(bins, 0);
        Point2 z = seeds[si];
        for (long k = 0; k < n; ++k) {
            if (k >= burn_in && (k - burn_in) % stride == 0) {
                ++a.counts[static_cast<size_t>(bin_index(z.y, m)) * m + bin_index(z.x, m)];
                observe(a.obs, 1.0, z);
                ++a.samples;
            }
            if (k + 1 == n) break;
            // Post-boundary contact is benign here: the right-owning branch
            // continues the orbit and the contact set has measure zero. Deep
            // in the branch tail posts are thinner than the boundary
            // tolerance, so treating adjacency as fatal would cull every
            // orbit that visits small x and bias the histogram.
            const BranchLookup lk = map.f().locate(z);
            if (lk.index < 1 || lk.tail_truncated) {
                a.dropped = true;
                break;
            }
            z = map.f().forward(lk.index, z);
            if (!(std::isfinite(z.x) && std::isfinite(z.y))) {
                a.dropped = true;
                break;
            }
            z = dithered(z, drng, si, k);
        }
    });

    EmpiricalMeasure em;
    em.m = m;
    em.mass.assign(bins, 0.0);
    std::vector<long> counts(bins, 0);
    double obs[5] = {0, 0, 0, 0, 0};
    for (const SeedAccum& a : acc) {
        if (a.dropped) {
            ++em.seeds_dropped;
            continue;
        }
        ++em.seeds_used;
        em.samples += a.samples;
        for (long b = 0; b < bins; ++b) counts[b] += a.counts[b];
        for (int j = 0; j < 5; ++j) obs[j] += a.obs[j];
    }
    if (em.seeds_used == 0) fail(Err::AllSeedsEscaped, "every seed orbit was dropped");

    for (long b = 0; b < bins; ++b) em.mass[b] = static_cast<double>(counts[b]) / em.samples;
    for (int j = 0; j < 5; ++j) em.means[j] = obs[j] / em.samples;

    if (em.seeds_used >= 2) {
        for (int j = 0; j < 5; ++j) {
            double var = 0.0;
            for (const SeedAccum& a : acc) {
                if (a.dropped) continue;
                const double d = a.obs[j] / a.samples - em.means[j];
                var += d * d;
            }
            em.sigmas[j] = std::sqrt(var / (em.seeds_used * (em.seeds_used - 1.0)));
        }
    }
    return em;
}

EmpiricalMeasure pushforward_srb(const PiecewiseMap& map, const Itinerary& past, long n, int m,
                                 long points, long density_depth, long stride, int threads,
                                 std::uint64_t dither_seed) {
    if (m < 1 || m > 4096) fail(Err::InvalidArgument, "histogram size must lie in [1, 4096]");
    if (n < 1) fail(Err::InvalidArgument, "step count must be positive");
    if (points < 16) fail(Err::InvalidArgument, "the cloud needs at least 16 points");
    if (stride < 1 || stride > n)
        fail(Err::InvalidArgument, "stride must lie in [1, n]");

    const SinaiDensity den = sinai_density(map, past, 0.5, density_depth);
    const CurveGraph& c = den.curve;
    const int ng = c.n();
    const double h = c.spacing();

    // Inverse CDF of xi times the arclength element, one equal-weight point
    // per quantile cell. The integrand is piecewise linear on the grid, so
    // each cell inverts through a quadratic.
    std::vector<double> w(ng), cdf(ng);
    for (int k = 0; k < ng; ++k) w[k] = den.xi[k] * std::hypot(1.0, c.dg[k]);
    cdf[0] = 0.0;
    for (int k = 1; k < ng; ++k) cdf[k] = cdf[k - 1] + 0.5 * (w[k - 1] + w[k]) * h;
    const double total_w = cdf[ng - 1];

    // Stratified quantiles: one point per cell, at a seeded random offset
    // within it. The offset fills the low mantissa bits, which keeps the
    // cloud off the dyadic lattice that exactly-binary maps would preserve.
    const CounterRng drng(dither_seed);
    std::vector<Point2> cloud(points);
    for (long j = 0; j < points; ++j) {
        const double target = (j + drng.open(1ULL << 40, j, 0.0, 1.0)) / points * total_w;
        const int k = static_cast<int>(
            std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin() - 1);
        const int kk = std::min(std::max(k, 0), ng - 2);
        const double r = target - cdf[kk];
        const double slope = (w[kk + 1] - w[kk]) / h;
        double t;
        if (std::fabs(slope) * h > 1e-12 * w[kk]) {
            t = (-w[kk] + std::sqrt(w[kk] * w[kk] + 2.0 * slope * r)) / slope;
        } else {
            t = r / w[kk];
        }
        const double x = std::min(std::max(c.x_at(kk) + t, c.x_lo), c.x_hi);
        cloud[j] = {x, c.value(x)};
    }

    // Fixed strata of contiguous quantiles: the units of parallel work and of
    // the Monte Carlo error estimate, independent of the thread count.
    const int n_strata = 16;
    struct Stratum {
        std::vector<double> mass;
        double obs[5] = {0, 0, 0, 0, 0};
        double weight = 0.0;
        double leaked = 0.0;
        long samples = 0;
    };
    std::vector<Stratum> strata(n_strata);
    const long bins = static_cast<long>(m) * m;
    const double wgt = 1.0 / points;
    const long records_per_point = n / stride;

    parallel_indices(n_strata, threads, [&](long s) {
        Stratum& st = strata[s];
        st.mass.assign(bins, 0.0);
        const long jlo = s * points / n_strata;
        const long jhi = (s + 1) * points / n_strata;
        for (long j = jlo; j < jhi; ++j) {
            Point2 z = cloud[j];
            long recorded = 0;
            bool lost = false;
            for (long k = 0; k < n; ++k) {
                // Record on the last step of each stride block, so strided
                // subsampling starts past the unmixed initial cloud. With
                // stride 1 every step is recorded, including step 0.
                if (k % stride == stride - 1) {
                    st.mass[static_cast<size_t>(bin_index(z.y, m)) * m + bin_index(z.x, m)] +=
                        wgt;
                    observe(st.obs, wgt, z);
                    st.weight += wgt;
                    ++st.samples;
                    ++recorded;
                }
                if (k + 1 == n) break;
                const BranchLookup lk = map.f().locate(z);
                if (lk.index < 1 || lk.tail_truncated) {
                    lost = true;
                    break;
                }
                z = map.f().forward(lk.index, z);
                if (!(std::isfinite(z.x) && std::isfinite(z.y))) {
                    lost = true;
                    break;
                }
                z = dithered(z, drng, j, k);
            }
            if (lost) st.leaked += wgt * static_cast<double>(records_per_point - recorded);
        }
    });

    EmpiricalMeasure em;
    em.m = m;
    em.mass.assign(bins, 0.0);
    double total_recorded = 0.0, total_leaked = 0.0;
    double obs[5] = {0, 0, 0, 0, 0};
    for (const Stratum& st : strata) {
        for (long b = 0; b < bins; ++b) em.mass[b] += st.mass[b];
        for (int j = 0; j < 5; ++j) obs[j] += st.obs[j];
        total_recorded += st.weight;
        total_leaked += st.leaked;
        em.samples += st.samples;
    }
    const double intended = static_cast<double>(records_per_point);
    em.mass_leaked = total_leaked / intended;
    if (em.mass_leaked > 1e-3) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "pushforward lost %.3g of its weight to the branch tail", em.mass_leaked);
        fail(Err::MassLeak, buf);
    }

    for (long b = 0; b < bins; ++b) em.mass[b] /= total_recorded;
    for (int j = 0; j < 5; ++j) em.means[j] = obs[j] / total_recorded;
    em.seeds_used = points;

    for (int j = 0; j < 5; ++j) {
        double var = 0.0;
        int used = 0;
        for (const Stratum& st : strata) {
            if (st.weight <= 0.0) continue;
            const double d = st.obs[j] / st.weight - em.means[j];
            var += d * d;
            ++used;
        }
        if (used >= 2) em.sigmas[j] = std::sqrt(var / (used * (used - 1.0)));
    }
    return em;
}

namespace {

// Interval of abscissae where the curve runs inside the word's post
// cylinder, found by iterating x to the exact cylinder slice at the curve's
// own height. Slices must be solved per height rather than interpolated: a
// deep cylinder drifts sideways across heights by far more than its own
// width, so any premade level grid would miss it entirely. The slice
// position varies with height at most like the boundary slopes, so the
// iteration contracts fast.
std::pair<double, double> curve_cylinder_interval(const PiecewiseMap& map,
                                                  const std::vector<long>& word,
                                                  const CurveGraph& c, double x0) {
    const auto edge = [&](bool lower) {
        double x = x0;
        for (int it = 0; it < 12; ++it) {
            const double xc = std::min(std::max(x, c.x_lo), c.x_hi);
            double lo = 0.0, hi = 0.0;
            cylinder_slice(map.f(), word, c.value(xc), lo, hi);
            const double next = lower ? lo : hi;
            if (std::fabs(next - x) < 1e-15 && it > 0) return next;
            x = next;
        }
        return x;
    };
    return {edge(true), edge(false)};
}

// log of the tangent stretch of F^word along the curve's direction at z.
double log_stretch_along(const PiecewiseMap& map, const CurveGraph& c, Point2 z,
                         const std::vector<long>& word) {
    double s = c.deriv(z.x);
    Point2 w = z;
    CompensatedSum acc;
    for (long b : word) {
        const Jet j = jet_at(map, b, w);
        const double v1 = j.f1x() + j.f1y() * s;
        const double v2 = j.f2x() + j.f2y() * s;
        acc.add(std::log(std::max(std::fabs(v1), std::fabs(v2))));
        s = v2 / v1;
        w = j.value;
    }
    return acc.value();
}

}  // namespace

HolonomyReport holonomy_test(const PiecewiseMap& map, const CurveGraph& gamma,
                             const CurveGraph& eta, long depth, int pairs,
                             std::uint64_t sample_seed) {
    if (depth < 1) fail(Err::InvalidArgument, "holonomy depth must be positive");
    if (pairs < 1) fail(Err::InvalidArgument, "at least one sample pair is required");
    for (const CurveGraph* c : {&gamma, &eta}) {
        if (std::fabs(c->x_lo) > 1e-9 || std::fabs(c->x_hi - 1.0) > 1e-9)
            fail(Err::InvalidArgument, "holonomy transversals must span the full width");
    }

    const CounterRng rng(sample_seed);
    HolonomyReport rep;
    rep.depth = depth;
    bool first = true;
    for (int j = 0; j < pairs; ++j) {
        const double xz = (j + rng.open(1, j, 0.05, 0.95)) / pairs;
        const Point2 z{xz, gamma.value(xz)};
        try {
            const ItineraryResult ir = forward_itinerary(map, z, depth, true);
            if (ir.boundary_hit) {
                ++rep.dropped;
                continue;
            }
            const std::vector<long>& word = ir.itinerary.symbols;
            const auto [ga, gb] = curve_cylinder_interval(map, word, gamma, xz);
            const auto [ea, eb] = curve_cylinder_interval(map, word, eta, 0.5 * (ga + gb));
            if (!(gb - ga > 1e-13) || !(eb - ea > 1e-13)) {
                ++rep.dropped;
                continue;
            }
            HolonomyPair hp;
            hp.z = z;
            const double xm = 0.5 * (ea + eb);
            hp.pi_z = {xm, eta.value(xm)};
            hp.density = arclength(gamma, ga, gb) / arclength(eta, ea, eb);
            hp.deriv_ratio = std::exp(log_stretch_along(map, gamma, z, ir.itinerary.symbols) -
                                      log_stretch_along(map, eta, hp.pi_z,
                                                        ir.itinerary.symbols));
            if (first) {
                rep.density_min = rep.density_max = hp.density;
                rep.ratio_min = rep.ratio_max = hp.deriv_ratio;
                first = false;
            } else {
                rep.density_min = std::min(rep.density_min, hp.density);
                rep.density_max = std::max(rep.density_max, hp.density);
                rep.ratio_min = std::min(rep.ratio_min, hp.deriv_ratio);
                rep.ratio_max = std::max(rep.ratio_max, hp.deriv_ratio);
            }
            rep.pairs.push_back(hp);
        } catch (const SrbError&) {
            ++rep.dropped;
        }
    }
    if (rep.pairs.empty()) fail(Err::UnderSampled, "every holonomy sample was dropped");
    return rep;
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) fail(Err::InvalidArgument, "gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series: P(a,x) = x^a e^-x / Gamma(a) * sum x^k / (a)_{k+1}.
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Upper continued fraction by the modified Lentz scheme.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double frac = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        frac *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * frac;
}

ChiSquareResult chi_square_uniform(const std::vector<double>& mass, double total_samples,
                                   double min_expected) {
    const long bins = static_cast<long>(mass.size());
    if (bins < 2) fail(Err::InvalidArgument, "the chi-square test needs at least two bins");
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (std::fabs(total - 1.0) > 1e-6)
        fail(Err::InvalidArgument, "the mass histogram must sum to one");
    const double expected = total_samples / bins;
    if (expected < min_expected)
        fail(Err::UnderSampled, "expected count per bin falls below the chi-square floor");

    ChiSquareResult res;
    CompensatedSum stat;
    for (double mi : mass) {
        const double d = mi * total_samples - expected;
        stat.add(d * d / expected);
    }
    res.statistic = stat.value();
    res.dof = bins - 1;
    res.p_value = gamma_q(res.dof / 2.0, res.statistic / 2.0);
    return res;
}

}  // namespace srblab
