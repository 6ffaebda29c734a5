// Entropy estimation along orbits: horizontal-frame growth, directional
// growth, cylinder visit frequencies, and the integral of log |D^uF|.

#include "srblab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orbit_util.hpp"
#include "srblab/error.hpp"
#include "srblab/measures.hpp"
#include "srblab/rng.hpp"

namespace srblab {

namespace {

using detail::CompensatedSum;
using detail::dithered;
using detail::parallel_indices;

void require_unit_square(Point2 z) {
    if (!(z.x >= 0.0 && z.x <= 1.0 && z.y >= 0.0 && z.y <= 1.0))
        fail(Err::InvalidArgument, "orbit seeds must lie in the unit square");
}

// Walks the dithered orbit of z for up to n steps, transporting a tangent of
// slope q through each branch jet. Every completed step hands the branch and
// the log of the horizontal growth |f1x + f1y q| to the sink; the tangent
// slope update (f2x + f2y q) / (f1x + f1y q) must stay inside the alpha-cone
// or the hyperbolicity conditions are broken and ConeEscape is thrown.
// Returns the number of completed steps: fewer than n means the orbit left
// the enumerable branches or produced a non-finite image.
template <typename Sink>
long transported_walk(const PiecewiseMap& map, Point2 z, double q, long n, std::uint64_t orbit,
                      const CounterRng& rng, Sink&& sink) {
    const double alpha = map.cone.alpha;
    for (long k = 0; k < n; ++k) {
        const BranchLookup lk = map.f().locate(z);
        if (lk.index < 1 || lk.tail_truncated) return k;
        const Jet j = map.f().jet(lk.index, z);
        const double g = j.f1x() + j.f1y() * q;
        const double qn = (j.f2x() + j.f2y() * q) / g;
        if (!(std::fabs(qn) <= alpha * (1.0 + 1e-9)))
            fail(Err::ConeEscape, "transported tangent left the alpha-cone at step " +
                                      std::to_string(k) + " (slope " + std::to_string(qn) + ")");
        sink(k, lk.index, std::log(std::fabs(g)));
        q = qn;
        z = j.value;
        if (!(std::isfinite(z.x) && std::isfinite(z.y))) return k + 1;
        z = dithered(z, rng, orbit, static_cast<std::uint64_t>(k));
    }
    return n;
}

// Shared seed-ensemble average of per-step log growths over steps
// k >= skip, used by the derivative-growth and integral routes.
EntropyEstimate ensemble_growth(const PiecewiseMap& map, const std::vector<Point2>& seeds, long n,
                                long skip, int threads, std::uint64_t dither_seed,
                                const char* route) {
    if (seeds.empty()) fail(Err::InvalidArgument, "at least one seed is required");
    for (const Point2& z : seeds) require_unit_square(z);

    struct OrbitValue {
        double value = 0.0;
        bool dropped = false;
    };
    const long n_seeds = static_cast<long>(seeds.size());
    std::vector<OrbitValue> per_seed(n_seeds);
    const CounterRng rng(dither_seed);

    parallel_indices(n_seeds, threads, [&](long si) {
        CompensatedSum acc;
        const long done = transported_walk(map, seeds[si], 0.0, n,
                                           static_cast<std::uint64_t>(si), rng,
                                           [&](long k, long, double lg) {
                                               if (k >= skip) acc.add(lg);
                                           });
        if (done < n) {
            per_seed[si].dropped = true;
            return;
        }
        per_seed[si].value = acc.value() / static_cast<double>(n - skip);
    });

    EntropyEstimate est;
    est.route = route;
    est.n = n;
    CompensatedSum mean;
    for (const OrbitValue& v : per_seed) {
        if (v.dropped) {
            ++est.seeds_dropped;
            continue;
        }
        ++est.seeds_used;
        mean.add(v.value);
    }
    if (est.seeds_used == 0) fail(Err::AllSeedsEscaped, "every seed orbit was dropped");
    est.value = mean.value() / est.seeds_used;
    if (est.seeds_used >= 2) {
        double var = 0.0;
        for (const OrbitValue& v : per_seed) {
            if (v.dropped) continue;
            const double d = v.value - est.value;
            var += d * d;
        }
        est.spread = std::sqrt(var / (est.seeds_used * (est.seeds_used - 1.0)));
    }
    return est;
}

}  // namespace

EntropyEstimate entropy_derivative_growth(const PiecewiseMap& map, const std::vector<Point2>& seeds,
                                          long n, int threads, std::uint64_t dither_seed) {
    if (n < 1000)
        fail(Err::InvalidArgument, "the growth-rate window must cover at least 1000 steps");
    return ensemble_growth(map, seeds, n, 0, threads, dither_seed, "derivative_growth");
}

EntropyEstimate entropy_directional(const PiecewiseMap& map, Point2 z, Vec2 v, long n,
                                    std::uint64_t dither_seed) {
    if (n < 1) fail(Err::InvalidArgument, "orbit length must be positive");
    require_unit_square(z);
    const double alpha = map.cone.alpha;
    if (!(std::fabs(v.v1) > 0.0) || !(std::fabs(v.v2) <= alpha * std::fabs(v.v1)))
        fail(Err::InvalidArgument, "the direction must lie in the alpha-cone");

    CompensatedSum acc;
    acc.add(std::log(std::fabs(v.v1)));
    const CounterRng rng(dither_seed);
    const long done =
        transported_walk(map, z, v.v2 / v.v1, n, 0, rng, [&](long, long, double lg) { acc.add(lg); });
    if (done < n)
        fail(Err::TailTruncated,
             "the orbit left the enumerable branches after " + std::to_string(done) + " steps");

    EntropyEstimate est;
    est.route = "directional";
    est.n = n;
    est.value = acc.value() / n;
    est.seeds_used = 1;
    return est;
}

CylinderEntropy entropy_cylinder(const PiecewiseMap& map, Point2 z, long depth_lo, long depth_hi,
                                 long n, std::uint64_t dither_seed) {
    if (depth_lo < 1 || depth_hi < depth_lo)
        fail(Err::InvalidArgument, "cylinder depths must satisfy 1 <= depth_lo <= depth_hi");
    if (depth_hi > 60) fail(Err::InvalidArgument, "cylinder depth is capped at 60");
    if (n < 2 * depth_hi)
        fail(Err::InvalidArgument, "the orbit must be much longer than the deepest cylinder");
    require_unit_square(z);

    // One pass: the first depth_hi symbols are the reference word; every
    // later full window contributes its prefix-match length to a histogram.
    std::vector<long> word;
    word.reserve(static_cast<std::size_t>(depth_hi));
    std::vector<long> ring(static_cast<std::size_t>(depth_hi), 0);
    std::vector<long> match_hist(static_cast<std::size_t>(depth_hi) + 1, 0);
    const CounterRng rng(dither_seed);

    const long done = transported_walk(
        map, z, 0.0, n, 0, rng, [&](long k, long branch, double) {
            if (static_cast<long>(word.size()) < depth_hi) word.push_back(branch);
            ring[static_cast<std::size_t>(k % depth_hi)] = branch;
            if (k + 1 >= depth_hi) {
                const long head = (k + 1) % depth_hi;  // oldest element of the window
                long m = 0;
                while (m < depth_hi &&
                       ring[static_cast<std::size_t>((head + m) % depth_hi)] == word[m])
                    ++m;
                ++match_hist[static_cast<std::size_t>(m)];
            }
        });
    if (done < depth_hi)
        fail(Err::TailTruncated,
             "the orbit left the enumerable branches before reading its own word");

    const double positions = static_cast<double>(done - depth_hi + 1);
    CylinderEntropy out;
    long tail_count = 0;
    std::vector<long> visits(static_cast<std::size_t>(depth_hi) + 1, 0);
    for (long m = depth_hi; m >= 1; --m) {
        tail_count += match_hist[static_cast<std::size_t>(m)];
        visits[static_cast<std::size_t>(m)] = tail_count;
    }
    for (long d = depth_lo; d <= depth_hi; ++d) {
        const long v = visits[static_cast<std::size_t>(d)];
        if (v < 30)
            fail(Err::UnderSampled, "depth-" + std::to_string(d) + " cylinder visited only " +
                                        std::to_string(v) + " times (< 30)");
        CylinderEntropyPoint p;
        p.depth = d;
        p.visits = v;
        p.value = -std::log(static_cast<double>(v) / positions) / static_cast<double>(d);
        out.by_depth.push_back(p);
    }

    out.estimate.route = "cylinder";
    out.estimate.n = done;
    out.estimate.value = out.by_depth.back().value;
    out.estimate.seeds_used = 1;
    const std::size_t nd = out.by_depth.size();
    if (nd >= 2)
        out.estimate.spread = std::fabs(out.by_depth[nd - 1].value - out.by_depth[nd - 2].value);
    return out;
}

EntropyEstimate entropy_integral(const PiecewiseMap& map, const std::vector<Point2>& seeds, long n,
                                 long burn_in, int threads, std::uint64_t dither_seed) {
    if (!map.f().declares_disjoint_strips())
        fail(Err::StripsOverlap,
             "the integral route needs strips declared disjoint; " + map.f().name() +
                 " makes no such declaration");
    if (burn_in < 0 || n <= burn_in)
        fail(Err::InvalidArgument, "need 0 <= burn_in < n");
    return ensemble_growth(map, seeds, n, burn_in, threads, dither_seed, "integral");
}

}  // namespace srblab
