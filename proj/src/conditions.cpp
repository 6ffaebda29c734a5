// Implementation of the sampled condition checks. Sampling is deterministic:
// branches ascending, then rows bottom to top, then columns left to right,
// with strict-inequality updates so the first worst sample is retained.
#include "srblab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "srblab/error.hpp"

namespace srblab {

namespace {

std::string truncation_note(const MapFamily& fam, long checked) {
    if (fam.max_branch() <= checked) return {};
    char buf[128];
    std::snprintf(buf, sizeof(buf), "checked branches 1..%ld of %ld", checked,
                  fam.max_branch());
    return buf;
}

// Calls fn(branch, z, jet) at every grid sample of every checked branch and
// returns the number of branches visited.
template <typename Fn>
long for_each_sample(const PiecewiseMap& map, const SamplingGrid& grid, Fn&& fn) {
    grid.validate();
    const MapFamily& fam = map.f();
    const long last = std::min<long>(grid.branch_limit, fam.max_branch());
    for (long i = 1; i <= last; ++i) {
        for (int jy = 0; jy < grid.ny; ++jy) {
            const double y = (jy + 0.5) / grid.ny;
            const double xl = fam.x_left(i, y);
            const double xr = fam.x_right(i, y);
            for (int jx = 0; jx < grid.nx; ++jx) {
                const double x = xl + (jx + 0.5) / grid.nx * (xr - xl);
                const Point2 z{x, y};
                fn(i, z, fam.jet(i, z));
            }
        }
    }
    return last;
}

}  // namespace

void SamplingGrid::validate() const {
    if (nx < 1 || ny < 1 || branch_limit < 1)
        fail(Err::InvalidArgument, "sampling grid must have nx, ny, branch_limit >= 1");
}

void ConditionEntry::offer(double margin, double quantity, const Point2& z, long branch,
                           const std::string& label) {
    ++samples;
    if (margin < min_margin) {
        min_margin = margin;
        worst_quantity = quantity;
        worst_point = z;
        worst_branch = branch;
        worst_label = label;
    }
}

bool ConditionReport::all_nonnegative(double tol) const {
    for (const auto& e : entries)
        if (e.min_margin < -tol) return false;
    return true;
}

const ConditionEntry& ConditionReport::entry(std::string_view name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    fail(Err::InvalidArgument, "no condition entry named " + std::string(name));
}

ConditionReport check_hyperbolicity(const PiecewiseMap& map, const ConeParams& cone,
                                    const SamplingGrid& grid) {
    cone.validate();
    const double a = cone.alpha;
    const double k0 = cone.K0;
    ConditionReport rep;
    rep.entries = {{"unstable_cone"}, {"unstable_expansion"}, {"stable_cone"},
                   {"stable_expansion"}};
    const long checked = for_each_sample(map, grid, [&](long i, const Point2& z, const Jet& j) {
        const double f1x = std::fabs(j.f1x()), f1y = std::fabs(j.f1y());
        const double f2x = std::fabs(j.f2x()), f2y = std::fabs(j.f2y());
        const double det = std::fabs(j.jacobian());
        const std::string label = map.f().branch_label(i);
        const double m1 = a * f1x - (f2x + a * f2y + a * a * f1y);
        const double m2 = f1x - a * f1y - k0;
        const double m3 = a * f1x - (f1y + a * f2y + a * a * f2x);
        const double m4 = f1x - a * f2x - det * k0;
        rep.entries[0].offer(m1, m1, z, i, label);
        rep.entries[1].offer(m2, m2, z, i, label);
        rep.entries[2].offer(m3, m3, z, i, label);
        rep.entries[3].offer(m4, m4, z, i, label);
    });
    rep.tail_note = truncation_note(map.f(), checked);
    return rep;
}

ConditionReport check_cone_properties(const PiecewiseMap& map, const ConeParams& cone,
                                      const SamplingGrid& grid) {
    cone.validate();
    const double a = cone.alpha;
    const double k0 = cone.K0;
    ConditionReport rep;
    rep.entries = {{"unstable_cone_image"}, {"unstable_growth"}, {"stable_cone_preimage"},
                   {"stable_growth"}};
    const long checked = for_each_sample(map, grid, [&](long i, const Point2& z, const Jet& j) {
        const std::string label = map.f().branch_label(i);
        const double det = j.jacobian();
        if (det == 0.0) {
            rep.entries[2].offer(-std::numeric_limits<double>::infinity(), 0.0, z, i, label);
            return;
        }
        for (const double s : {1.0, -1.0}) {
            // Horizontal-cone boundary ray pushed forward by Df.
            const Vec2 u = j.apply_d1({1.0, s * a});
            rep.entries[0].offer(a * std::fabs(u.v1) - std::fabs(u.v2), max_norm(u), z, i, label);
            rep.entries[1].offer(max_norm(u) - k0, max_norm(u), z, i, label);
            // Vertical-cone boundary ray pulled back by Df^{-1}.
            const Vec2 v{s * a, 1.0};
            const Vec2 w{(j.f2y() * v.v1 - j.f1y() * v.v2) / det,
                         (-j.f2x() * v.v1 + j.f1x() * v.v2) / det};
            rep.entries[2].offer(a * std::fabs(w.v2) - std::fabs(w.v1), max_norm(w), z, i, label);
            rep.entries[3].offer(max_norm(w) - k0, max_norm(w), z, i, label);
        }
    });
    rep.tail_note = truncation_note(map.f(), checked);
    return rep;
}

ConditionReport check_derivative_ratios(const PiecewiseMap& map, const ConeParams& cone,
                                        const SamplingGrid& grid) {
    cone.validate();
    const double a = cone.alpha;
    const double contraction_bound = 1.0 / (cone.K0 * cone.K0) + a * a;
    ConditionReport rep;
    rep.entries = {{"shear_ratio"}, {"transverse_ratio"}, {"contraction_ratio"}};
    const long checked = for_each_sample(map, grid, [&](long i, const Point2& z, const Jet& j) {
        const double f1x = std::fabs(j.f1x());
        const std::string label = map.f().branch_label(i);
        const double r1 = std::fabs(j.f1y()) / f1x;
        const double r2 = std::fabs(j.f2x()) / f1x;
        const double r3 = std::fabs(j.f2y()) / f1x;
        rep.entries[0].offer(a - r1, r1, z, i, label);
        rep.entries[1].offer(a - r2, r2, z, i, label);
        rep.entries[2].offer(contraction_bound - r3, r3, z, i, label);
    });
    rep.tail_note = truncation_note(map.f(), checked);
    return rep;
}

ConditionReport check_distortion_bound(const PiecewiseMap& map, const SamplingGrid& grid) {
    ConditionReport rep;
    rep.entries = {{"distortion_ratio"}};
    const long checked = for_each_sample(map, grid, [&](long i, const Point2& z, const Jet& j) {
        const double ratio = j.d2_max_abs() / std::fabs(j.f1x()) * zwidth(map, i, z);
        rep.entries[0].offer(map.C0 - ratio, ratio, z, i, map.f().branch_label(i));
    });
    rep.tail_note = truncation_note(map.f(), checked);
    return rep;
}

ConditionReport check_partition(const PiecewiseMap& map, const SamplingGrid& grid) {
    grid.validate();
    const MapFamily& fam = map.f();
    const long last = std::min<long>(grid.branch_limit, fam.max_branch());
    ConditionReport rep;
    rep.entries = {{"posts_disjoint"}, {"posts_cover"}};

    struct Span {
        double lo, hi;
        long branch;
    };
    for (int jy = 0; jy < grid.ny; ++jy) {
        const double y = (jy + 0.5) / grid.ny;
        std::vector<Span> spans;
        spans.reserve(static_cast<std::size_t>(last));
        double covered = 0.0;
        for (long i = 1; i <= last; ++i) {
            const double xl = fam.x_left(i, y);
            const double xr = fam.x_right(i, y);
            spans.push_back({xl, xr, i});
            covered += xr - xl;
        }
        std::sort(spans.begin(), spans.end(),
                  [](const Span& a, const Span& b) { return a.lo < b.lo; });
        double gap_total = 0.0;
        for (std::size_t k = 0; k + 1 < spans.size(); ++k) {
            const double gap = spans[k + 1].lo - spans[k].hi;
            rep.entries[0].offer(gap, gap, {spans[k].hi, y}, spans[k].branch,
                                 fam.branch_label(spans[k].branch));
            gap_total += std::max(0.0, gap);
        }
        if (spans.size() == 1)
            rep.entries[0].offer(0.0, 0.0, {spans[0].hi, y}, spans[0].branch,
                                 fam.branch_label(spans[0].branch));
        rep.entries[1].offer(-gap_total, covered, {spans.front().lo, y}, spans.front().branch,
                             fam.branch_label(spans.front().branch));
    }

    if (fam.declares_disjoint_strips()) {
        ConditionEntry strips{"strips_disjoint"};
        for (int jx = 0; jx < grid.nx; ++jx) {
            const double x = (jx + 0.5) / grid.nx;
            std::vector<Span> bands;
            bands.reserve(static_cast<std::size_t>(last));
            for (long i = 1; i <= last; ++i) {
                double lo = 0.0, hi = 0.0;
                fam.strip_bounds(i, x, lo, hi);
                bands.push_back({lo, hi, i});
            }
            std::sort(bands.begin(), bands.end(),
                      [](const Span& a, const Span& b) { return a.lo < b.lo; });
            for (std::size_t k = 0; k + 1 < bands.size(); ++k) {
                const double gap = bands[k + 1].lo - bands[k].hi;
                strips.offer(gap, gap, {x, bands[k].hi}, bands[k].branch,
                             fam.branch_label(bands[k].branch));
            }
            if (bands.size() == 1)
                strips.offer(0.0, 0.0, {x, bands[0].hi}, bands[0].branch,
                             fam.branch_label(bands[0].branch));
        }
        rep.entries.push_back(std::move(strips));
    }
    rep.tail_note = truncation_note(fam, last);
    return rep;
}

double largest_passing_K0(const PiecewiseMap& map, double alpha, const SamplingGrid& grid) {
    double best = std::numeric_limits<double>::infinity();
    for_each_sample(map, grid, [&](long, const Point2&, const Jet& j) {
        const double f1x = std::fabs(j.f1x());
        const double det = std::fabs(j.jacobian());
        best = std::min(best, f1x - alpha * std::fabs(j.f1y()));
        best = std::min(best, (f1x - alpha * std::fabs(j.f2x())) / det);
    });
    return best;
}

namespace {

// Streamed accumulation of -dmax log(dmin) with the decade-ago term kept for
// the divergence test. Widths at or below the underflow threshold add zero.
struct LogsumAccumulator {
    long n_total;
    double sum = 0.0;
    double last = 0.0;
    double decade_ago = 0.0;
    long decade_index;

    explicit LogsumAccumulator(long n) : n_total(n), decade_index(std::max<long>(1, n / 10)) {}

    void add(long i, double dmax, double dmin) {
        if (dmin > dmax || dmin < 0.0)
            fail(Err::InvalidArgument, "width series needs 0 <= delta_min <= delta_max");
        const double term = dmax <= 0.0 ? 0.0 : -dmax * std::log(dmin);
        sum += term;
        last = term;
        if (i == decade_index) decade_ago = term;
    }

    SeriesTail finish() const {
        SeriesTail out;
        out.partial_sum = sum;
        out.last_term = last;
        out.terms = n_total;
        out.diverging = n_total > 10 && last >= decade_ago && last > 0.0;
        return out;
    }
};

}  // namespace

SeriesTail check_width_logsum(const PiecewiseMap& map, long n_max, int y_samples) {
    if (n_max < 1 || y_samples < 1)
        fail(Err::InvalidArgument, "width log series needs n_max >= 1 and y_samples >= 1");
    const MapFamily& fam = map.f();
    const long last = std::min<long>(n_max, fam.max_branch());
    LogsumAccumulator acc(last);
    for (long i = 1; i <= last; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        double dmax = 0.0;
        if (fam.affine()) {
            dmin = dmax = fam.x_right(i, 0.5) - fam.x_left(i, 0.5);
        } else {
            // y_samples interior heights plus both endpoints.
            for (int jy = 0; jy <= y_samples + 1; ++jy) {
                const double y = static_cast<double>(jy) / (y_samples + 1);
                const double w = fam.x_right(i, y) - fam.x_left(i, y);
                dmin = std::min(dmin, w);
                dmax = std::max(dmax, w);
            }
        }
        acc.add(i, dmax, dmin);
    }
    SeriesTail out = acc.finish();
    out.tail_note = truncation_note(fam, last);
    return out;
}

SeriesTail width_logsum_terms(const std::vector<double>& delta_max,
                              const std::vector<double>& delta_min) {
    if (delta_max.size() != delta_min.size() || delta_max.empty())
        fail(Err::InvalidArgument, "width sequences must be nonempty and equal length");
    LogsumAccumulator acc(static_cast<long>(delta_max.size()));
    for (std::size_t i = 0; i < delta_max.size(); ++i)
        acc.add(static_cast<long>(i) + 1, delta_max[i], delta_min[i]);
    return acc.finish();
}

double tail_sum(const std::vector<double>& x, const std::vector<double>& y, double eps) {
    if (x.size() != y.size())
        fail(Err::InvalidArgument, "tail_sum needs sequences of equal length");
    if (!(eps > 0.0)) fail(Err::InvalidArgument, "tail_sum needs eps > 0");
    // Index i belongs to D_n exactly for n <= j_i = floor(-log(y_i)/eps);
    // group by j and sum j * c_j in increasing j for a deterministic order.
    std::vector<std::pair<long, double>> groups;
    groups.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) fail(Err::InvalidArgument, "tail_sum needs x_i > 0");
        if (!(y[i] > 0.0 && y[i] < 1.0)) fail(Err::InvalidArgument, "tail_sum needs y_i in (0,1)");
        // The forward nudge settles inputs that sit exactly on a group
        // boundary (e.g. y = 2^-i with eps = log 2) onto the included side.
        const long j = static_cast<long>(std::floor(-std::log(y[i]) / eps + 1e-9));
        if (j >= 1) groups.emplace_back(j, x[i]);
    }
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double sum = 0.0;
    std::size_t k = 0;
    while (k < groups.size()) {
        const long j = groups[k].first;
        double cj = 0.0;
        for (; k < groups.size() && groups[k].first == j; ++k) cj += groups[k].second;
        sum += static_cast<double>(j) * cj;
    }
    return sum;
}

}  // namespace srblab
