// Itineraries, cylinders, and the coding map. Post cylinders reuse the exact
// slice pullback from the family layer; strip cylinders are sampled images of
// post edges; the coding map alternates the two localizations until the
// midpoints settle.
#include "srblab/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srblab/error.hpp"

namespace srblab {

namespace {

void require_orientation(const Itinerary& it, Orientation want, const char* what) {
    it.validate();
    if (it.orientation != want)
        fail(Err::InvalidArgument, std::string(what) + ": wrong itinerary orientation");
}

void require_symbols_in_range(const PiecewiseMap& map, const Itinerary& it) {
    for (long s : it.symbols)
        if (s > map.f().max_branch())
            fail(Err::TailTruncated,
                 "symbol " + std::to_string(s) + " exceeds the family's branch count");
}

}  // namespace

void Itinerary::validate() const {
    if (symbols.empty()) fail(Err::InvalidArgument, "itinerary must be nonempty");
    for (long s : symbols)
        if (s < 1) fail(Err::InvalidArgument, "itinerary symbols must be >= 1");
}

ItineraryResult forward_itinerary(const PiecewiseMap& map, Point2 z, long n,
                                  bool strict_interior) {
    if (n < 1) fail(Err::InvalidArgument, "itinerary length must be >= 1");
    ItineraryResult out;
    out.itinerary.orientation = Orientation::Forward;
    for (long k = 0; k < n; ++k) {
        const BranchLookup hit = branch_of(map, z);
        if (strict_interior && hit.boundary_adjacent) {
            out.boundary_hit = k;
            return out;
        }
        out.itinerary.symbols.push_back(hit.index);
        z = map.f().forward(hit.index, z);
    }
    return out;
}

double Cylinder::width_min() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& l : levels) w = std::min(w, l.hi - l.lo);
    return w;
}

double Cylinder::width_max() const {
    double w = 0.0;
    for (const auto& l : levels) w = std::max(w, l.hi - l.lo);
    return w;
}

std::pair<double, double> Cylinder::bounds_at(double coord) const {
    if (levels.empty()) fail(Err::InvalidArgument, "cylinder has no sampled levels");
    if (coord <= levels.front().at) return {levels.front().lo, levels.front().hi};
    if (coord >= levels.back().at) return {levels.back().lo, levels.back().hi};
    for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
        const auto& a = levels[k];
        const auto& b = levels[k + 1];
        if (coord <= b.at) {
            const double t = b.at == a.at ? 0.0 : (coord - a.at) / (b.at - a.at);
            return {a.lo + t * (b.lo - a.lo), a.hi + t * (b.hi - a.hi)};
        }
    }
    return {levels.back().lo, levels.back().hi};
}

Cylinder make_post_cylinder(const PiecewiseMap& map, const Itinerary& word, int n_levels) {
    require_orientation(word, Orientation::Forward, "post cylinder");
    require_symbols_in_range(map, word);
    if (n_levels < 2) fail(Err::InvalidArgument, "post cylinder needs at least 2 levels");
    Cylinder c;
    c.kind = CylinderKind::Post;
    c.itinerary = word;
    c.levels.reserve(static_cast<std::size_t>(n_levels));
    for (int j = 0; j < n_levels; ++j) {
        const double y = static_cast<double>(j) / (n_levels - 1);
        double lo = 0.0, hi = 0.0;
        cylinder_slice(map.f(), word.symbols, y, lo, hi);
        c.levels.push_back({y, lo, hi});
    }
    return c;
}

Cylinder make_strip_cylinder(const PiecewiseMap& map, const Itinerary& word, int x_samples) {
    require_orientation(word, Orientation::Backward, "strip cylinder");
    require_symbols_in_range(map, word);
    if (x_samples < 2) fail(Err::InvalidArgument, "strip cylinder needs at least 2 x-samples");
    const MapFamily& fam = map.f();
    // The strip equals the image of the word's post cylinder under the word's
    // branch composition; its boundary curves are the images of the post's
    // bottom and top edges.
    double lo0 = 0.0, hi0 = 0.0, lo1 = 0.0, hi1 = 0.0;
    cylinder_slice(fam, word.symbols, 0.0, lo0, hi0);
    cylinder_slice(fam, word.symbols, 1.0, lo1, hi1);
    Cylinder c;
    c.kind = CylinderKind::Strip;
    c.itinerary = word;
    c.levels.reserve(static_cast<std::size_t>(x_samples));
    for (int k = 0; k < x_samples; ++k) {
        const double frac = (k + 0.5) / x_samples;
        Point2 bot{lo0 + frac * (hi0 - lo0), 0.0};
        Point2 top{lo1 + frac * (hi1 - lo1), 1.0};
        for (long s : word.symbols) {
            bot = fam.forward(s, bot);
            top = fam.forward(s, top);
        }
        CylinderLevel lv;
        lv.at = 0.5 * (bot.x + top.x);
        lv.lo = std::min(bot.y, top.y);
        lv.hi = std::max(bot.y, top.y);
        c.levels.push_back(lv);
    }
    std::sort(c.levels.begin(), c.levels.end(),
              [](const CylinderLevel& a, const CylinderLevel& b) { return a.at < b.at; });
    return c;
}

Cylinder refine_cylinder(const PiecewiseMap& map, const Cylinder& c, long symbol) {
    if (c.kind != CylinderKind::Post)
        fail(Err::InvalidArgument, "only post cylinders can be refined");
    Itinerary next = c.itinerary;
    next.symbols.push_back(symbol);
    Cylinder out = make_post_cylinder(map, next, static_cast<int>(c.levels.size()));
    if (out.width_min() < 0.0) fail(Err::EmptyCylinder, "refined cylinder has empty slices");
    return out;
}

CodedPoint point_from_itinerary(const PiecewiseMap& map, const Itinerary& past,
                                const Itinerary& future, long depth) {
    require_orientation(past, Orientation::Backward, "coding map");
    require_orientation(future, Orientation::Forward, "coding map");
    if (depth < 1) fail(Err::InvalidArgument, "coding depth must be >= 1");
    if (past.depth() < depth)
        fail(Err::InsufficientPast, "past itinerary shorter than the requested depth");
    if (future.depth() < depth)
        fail(Err::InvalidArgument, "future itinerary shorter than the requested depth");

    Itinerary past_word;
    past_word.orientation = Orientation::Backward;
    past_word.symbols.assign(past.symbols.end() - depth, past.symbols.end());
    Itinerary future_word;
    future_word.orientation = Orientation::Forward;
    future_word.symbols.assign(future.symbols.begin(), future.symbols.begin() + depth);
    require_symbols_in_range(map, past_word);
    require_symbols_in_range(map, future_word);

    const Cylinder strip = make_strip_cylinder(map, past_word);
    double x = 0.5, y = 0.5;
    double xw = 1.0, yw = 1.0;
    for (int iter = 0; iter < 4; ++iter) {
        const auto [ylo, yhi] = strip.bounds_at(x);
        y = 0.5 * (ylo + yhi);
        yw = yhi - ylo;
        double xlo = 0.0, xhi = 0.0;
        cylinder_slice(map.f(), future_word.symbols, y, xlo, xhi);
        x = 0.5 * (xlo + xhi);
        xw = xhi - xlo;
    }
    return {{x, y}, std::max(xw, yw)};
}

}  // namespace srblab
