// Run orchestration: config schema, family resolution, the eight
// subcommands, and deterministic JSON/CSV artifact emission. Numbers are
// printed with %.17g (CSV) or shortest round-trip form (JSON); nothing is
// timestamped, so identical configs give byte-identical artifacts.

#include "srblab/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "srblab/conditions.hpp"
#include "srblab/curve.hpp"
#include "srblab/distortion.hpp"
#include "srblab/entropy.hpp"
#include "srblab/error.hpp"
#include "srblab/families.hpp"
#include "srblab/graph_transform.hpp"
#include "srblab/measures.hpp"
#include "srblab/rng.hpp"
#include "srblab/symbolic.hpp"

namespace srblab {

namespace {

using nlohmann::json;

const char* const kCommands[] = {"check",        "itinerary",       "manifold", "distortion",
                                 "srb-birkhoff", "srb-pushforward", "holonomy", "entropy"};

bool known_command(const std::string& name) {
    for (const char* c : kCommands)
        if (name == c) return true;
    return false;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::ConfigInvalid, "cannot open " + path + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(Err::ConfigInvalid, "cannot write " + path);
}

// A CSV file: one header comment line documenting the columns, then rows.
struct Csv {
    std::string text;

    explicit Csv(const std::string& columns) { text = "# " + columns + "\n"; }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) text += ',';
            text += cells[k];
        }
        text += '\n';
    }
};

// --- config schema -----------------------------------------------------------

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    if (!j.is_object()) fail(Err::ConfigInvalid, where + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            fail(Err::ConfigInvalid, "unknown key \"" + item.key() + "\" in " + where);
    }
}

template <typename T>
void read_field(const json& j, const char* key, T& into) {
    const auto it = j.find(key);
    if (it == j.end()) return;
    try {
        into = it->get<T>();
    } catch (const json::exception&) {
        fail(Err::ConfigInvalid, std::string("key \"") + key + "\" has the wrong type");
    }
}

FamilySpec family_from_json(const json& j) {
    require_keys(j, {"kind", "branches", "eps", "n_max", "alpha", "k0", "c0", "power",
                     "power_depth_limit", "custom"},
                 "family");
    FamilySpec s;
    read_field(j, "kind", s.kind);
    read_field(j, "branches", s.branches);
    read_field(j, "eps", s.eps);
    read_field(j, "n_max", s.n_max);
    read_field(j, "alpha", s.alpha);
    read_field(j, "k0", s.k0);
    read_field(j, "c0", s.c0);
    read_field(j, "power", s.power);
    read_field(j, "power_depth_limit", s.power_depth_limit);
    if (j.contains("custom")) {
        const json& c = j.at("custom");
        require_keys(c,
                     {"label", "n_max", "affine", "disjoint_strips", "x_left", "x_right", "f1",
                      "f2", "f1x", "f1y", "f2x", "f2y", "f1xx", "f1xy", "f1yy", "f2xx", "f2xy",
                      "f2yy"},
                     "family.custom");
        read_field(c, "label", s.custom.label);
        read_field(c, "n_max", s.custom.n_max);
        read_field(c, "affine", s.custom.affine);
        read_field(c, "disjoint_strips", s.custom.disjoint_strips);
        read_field(c, "x_left", s.custom.x_left);
        read_field(c, "x_right", s.custom.x_right);
        read_field(c, "f1", s.custom.f1);
        read_field(c, "f2", s.custom.f2);
        read_field(c, "f1x", s.custom.f1x);
        read_field(c, "f1y", s.custom.f1y);
        read_field(c, "f2x", s.custom.f2x);
        read_field(c, "f2y", s.custom.f2y);
        read_field(c, "f1xx", s.custom.f1xx);
        read_field(c, "f1xy", s.custom.f1xy);
        read_field(c, "f1yy", s.custom.f1yy);
        read_field(c, "f2xx", s.custom.f2xx);
        read_field(c, "f2xy", s.custom.f2xy);
        read_field(c, "f2yy", s.custom.f2yy);
    }
    return s;
}

json family_to_json(const FamilySpec& s) {
    json j;
    j["kind"] = s.kind;
    j["branches"] = s.branches;
    j["eps"] = s.eps;
    j["n_max"] = s.n_max;
    j["alpha"] = s.alpha;
    j["k0"] = s.k0;
    j["c0"] = s.c0;
    j["power"] = s.power;
    j["power_depth_limit"] = s.power_depth_limit;
    if (s.kind == "custom") {
        json c;
        c["label"] = s.custom.label;
        c["n_max"] = s.custom.n_max;
        c["affine"] = s.custom.affine;
        c["disjoint_strips"] = s.custom.disjoint_strips;
        c["x_left"] = s.custom.x_left;
        c["x_right"] = s.custom.x_right;
        c["f1"] = s.custom.f1;
        c["f2"] = s.custom.f2;
        c["f1x"] = s.custom.f1x;
        c["f1y"] = s.custom.f1y;
        c["f2x"] = s.custom.f2x;
        c["f2y"] = s.custom.f2y;
        c["f1xx"] = s.custom.f1xx;
        c["f1xy"] = s.custom.f1xy;
        c["f1yy"] = s.custom.f1yy;
        c["f2xx"] = s.custom.f2xx;
        c["f2xy"] = s.custom.f2xy;
        c["f2yy"] = s.custom.f2yy;
        j["custom"] = c;
    }
    return j;
}

// Defaults that depend on the command, applied before validation so the
// resolved config is self-describing.
void fill_defaults(RunConfig& c) {
    if (c.family.kind == "lueroth" || c.family.kind == "perturbed_lueroth") {
        if (c.family.n_max == 0) c.family.n_max = 100000000L;
    }
    if (c.threads == 0) {
        if (const char* env = std::getenv("SRBLAB_THREADS")) {
            char* end = nullptr;
            const long t = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || t < 1 || t > 1024)
                fail(Err::ConfigInvalid, "SRBLAB_THREADS must be a positive integer");
            c.threads = static_cast<int>(t);
        } else {
            c.threads = 1;
        }
    }
    if (c.command == "check") {
        if (c.n == 0) c.n = 100000;
        if (c.grid == 0) c.grid = 32;
    } else if (c.command == "itinerary") {
        if (c.n == 0) c.n = 64;
    } else if (c.command == "manifold") {
        if (c.depth == 0) c.depth = 8;
        if (c.grid == 0) c.grid = 257;
        if (c.tolerance == 0.0) c.tolerance = 1e-10;
    } else if (c.command == "distortion") {
        if (c.depth == 0) c.depth = 16;
    } else if (c.command == "srb-birkhoff") {
        if (c.n == 0) c.n = 100000;
        if (c.grid == 0) c.grid = 64;
        if (c.tolerance == 0.0) c.tolerance = 0.001;
    } else if (c.command == "srb-pushforward") {
        if (c.n == 0) c.n = 4000;
        if (c.grid == 0) c.grid = 64;
        if (c.tolerance == 0.0) c.tolerance = 0.001;
    } else if (c.command == "holonomy") {
        if (c.depth == 0) c.depth = 6;
    } else if (c.command == "entropy") {
        if (c.n == 0) c.n = 100000;
        if (c.depth == 0) c.depth = 8;
    }
    if (c.expect_uniform == -1)
        c.expect_uniform = (c.family.kind == "baker" || c.family.kind == "lueroth") ? 1 : 0;
}

void validate_config(const RunConfig& c) {
    if (!known_command(c.command))
        fail(Err::ConfigInvalid, "unknown command \"" + c.command + "\"");
    const FamilySpec& f = c.family;
    if (f.kind != "baker" && f.kind != "lueroth" && f.kind != "perturbed_lueroth" &&
        f.kind != "custom")
        fail(Err::ConfigInvalid, "unknown family kind \"" + f.kind + "\"");
    if (f.kind == "baker" && (f.branches < 2 || f.branches > 1024))
        fail(Err::ConfigInvalid, "baker branches must lie in [2, 1024]");
    if (f.kind == "perturbed_lueroth" && !(f.eps > 0.0 && f.eps <= 0.1))
        fail(Err::ConfigInvalid, "perturbation eps must lie in (0, 0.1]");
    if (f.n_max < 0) fail(Err::ConfigInvalid, "family n_max must be nonnegative");
    if (f.alpha != 0.0 && !(f.alpha > 0.0 && f.alpha < 1.0))
        fail(Err::ConfigInvalid, "alpha must lie in (0, 1)");
    if (f.k0 != 0.0 && !(f.k0 > 1.0)) fail(Err::ConfigInvalid, "k0 must exceed 1");
    if (f.c0 < 0.0) fail(Err::ConfigInvalid, "c0 must be nonnegative");
    if (f.power < 1 || f.power > 8) fail(Err::ConfigInvalid, "power must lie in [1, 8]");
    if (f.power_depth_limit < 1) fail(Err::ConfigInvalid, "power_depth_limit must be positive");
    if (f.kind == "custom" && !(f.alpha > 0.0 && f.k0 > 1.0))
        fail(Err::ConfigInvalid, "custom families must specify alpha and k0");

    if (c.threads < 1 || c.threads > 1024)
        fail(Err::ConfigInvalid, "threads must lie in [1, 1024]");
    if (c.out_dir.empty()) fail(Err::ConfigInvalid, "out_dir must not be empty");
    if (c.n < 0 || c.depth < 0 || c.grid < 0) fail(Err::ConfigInvalid, "sizes must be nonnegative");
    if (c.seed_count < 1 || c.seed_count > 100000)
        fail(Err::ConfigInvalid, "seed_count must lie in [1, 100000]");
    if (c.burn_in < 0) fail(Err::ConfigInvalid, "burn_in must be nonnegative");
    if (c.stride < 1) fail(Err::ConfigInvalid, "stride must be positive");
    if (c.points < 1) fail(Err::ConfigInvalid, "points must be positive");
    if (c.density_depth < 1) fail(Err::ConfigInvalid, "density_depth must be positive");
    if (c.pairs < 1) fail(Err::ConfigInvalid, "pairs must be positive");
    if (c.route != "all" && c.route != "derivative_growth" && c.route != "directional" &&
        c.route != "cylinder" && c.route != "integral")
        fail(Err::ConfigInvalid, "unknown entropy route \"" + c.route + "\"");
    if (c.tolerance < 0.0) fail(Err::ConfigInvalid, "tolerance must be nonnegative");
    if (!(c.x >= 0.0 && c.x <= 1.0 && c.y >= 0.0 && c.y <= 1.0))
        fail(Err::ConfigInvalid, "base point must lie in the unit square");
    if (!std::isfinite(c.v1) || !std::isfinite(c.v2))
        fail(Err::ConfigInvalid, "direction must be finite");
    if (!(c.y_gamma > 0.0 && c.y_gamma < 1.0 && c.y_eta > 0.0 && c.y_eta < 1.0))
        fail(Err::ConfigInvalid, "transversal heights must lie in (0, 1)");
    for (long s : c.word)
        if (s < 1) fail(Err::ConfigInvalid, "word symbols must be positive");
    if (c.expect_uniform < 0 || c.expect_uniform > 1)
        fail(Err::ConfigInvalid, "expect_uniform must be -1, 0, or 1");
}

// --- command helpers ---------------------------------------------------------

Itinerary make_word(std::vector<long> symbols, Orientation o) {
    Itinerary it;
    it.symbols = std::move(symbols);
    it.orientation = o;
    return it;
}

// Seeded word over the small branches; explicit config words take priority.
std::vector<long> resolved_word(const RunConfig& cfg, const PiecewiseMap& map, long length) {
    if (!cfg.word.empty()) return cfg.word;
    const long max_symbol = std::min<long>(map.f().max_branch(), 3);
    CounterRng rng(cfg.seed);
    std::vector<long> out;
    out.reserve(static_cast<std::size_t>(length));
    for (long k = 0; k < length; ++k)
        out.push_back(1 + static_cast<long>(rng.raw(3, static_cast<std::uint64_t>(k)) %
                                            static_cast<std::uint64_t>(max_symbol)));
    return out;
}

json entry_to_json(const ConditionEntry& e) {
    json j;
    j["margin"] = e.min_margin;
    j["worst_quantity"] = e.worst_quantity;
    j["worst_x"] = e.worst_point.x;
    j["worst_y"] = e.worst_point.y;
    j["worst_branch"] = e.worst_branch;
    j["samples"] = e.samples;
    return j;
}

json estimate_to_json(const EntropyEstimate& e) {
    json j;
    j["value"] = e.value;
    j["spread"] = e.spread;
    j["n"] = e.n;
    j["seeds_used"] = e.seeds_used;
    j["seeds_dropped"] = e.seeds_dropped;
    return j;
}

json measure_to_json(const EmpiricalMeasure& em) {
    json j;
    j["samples"] = em.samples;
    j["seeds_used"] = em.seeds_used;
    j["seeds_dropped"] = em.seeds_dropped;
    j["mass_leaked"] = em.mass_leaked;
    json means, sigmas;
    for (int k = 0; k < kObservableCount; ++k) {
        means[kObservables[k]] = em.means[k];
        sigmas[kObservables[k]] = em.sigmas[k];
    }
    j["means"] = means;
    j["sigmas"] = sigmas;
    return j;
}

void write_histogram_csv(const std::string& path, const EmpiricalMeasure& em) {
    Csv csv("iy,ix,mass  (row-major histogram bins over the unit square; mass sums to 1)");
    for (int iy = 0; iy < em.m; ++iy)
        for (int ix = 0; ix < em.m; ++ix)
            csv.row({std::to_string(iy), std::to_string(ix),
                     num(em.mass[static_cast<std::size_t>(iy) * em.m + ix])});
    write_text(path, csv.text);
}

struct CommandOutcome {
    json results;
    int status = 0;
    std::vector<std::string> data_files;
};

// --- subcommands -------------------------------------------------------------

CommandOutcome run_check(const RunConfig& cfg, const PiecewiseMap& map) {
    SamplingGrid grid;
    grid.nx = cfg.grid;
    grid.ny = cfg.grid;
    grid.validate();

    const std::vector<ConditionReport> reports{
        check_hyperbolicity(map, map.cone, grid), check_cone_properties(map, map.cone, grid),
        check_derivative_ratios(map, map.cone, grid), check_distortion_bound(map, grid),
        check_partition(map, grid)};
    const SeriesTail logsum = check_width_logsum(map, cfg.n);
    const double k0_best = largest_passing_K0(map, map.cone.alpha, grid);

    Csv csv("name,min_margin,worst_quantity,worst_x,worst_y,worst_branch,worst_label,samples");
    json entries;
    bool all_ok = true;
    for (const ConditionReport& rep : reports) {
        for (const ConditionEntry& e : rep.entries) {
            entries[e.name] = entry_to_json(e);
            csv.row({e.name, num(e.min_margin), num(e.worst_quantity), num(e.worst_point.x),
                     num(e.worst_point.y), std::to_string(e.worst_branch), e.worst_label,
                     std::to_string(e.samples)});
            if (!(e.min_margin >= -cfg.tolerance)) all_ok = false;
        }
    }
    write_text(cfg.out_dir + "/conditions.csv", csv.text);

    CommandOutcome oc;
    oc.results["entries"] = entries;
    oc.results["all_nonnegative"] = all_ok;
    oc.results["largest_passing_k0"] = k0_best;
    json ls;
    ls["partial_sum"] = logsum.partial_sum;
    ls["last_term"] = logsum.last_term;
    ls["terms"] = logsum.terms;
    ls["diverging"] = logsum.diverging;
    oc.results["width_logsum"] = ls;
    oc.status = (all_ok && !logsum.diverging) ? 0 : 1;
    oc.data_files = {"conditions.csv"};
    return oc;
}

CommandOutcome run_itinerary(const RunConfig& cfg, const PiecewiseMap& map) {
    const ItineraryResult res =
        forward_itinerary(map, {cfg.x, cfg.y}, cfg.n, cfg.strict_interior);

    Csv csv("k,symbol  (forward orbit branch indices, 1-based)");
    for (std::size_t k = 0; k < res.itinerary.symbols.size(); ++k)
        csv.row({std::to_string(k), std::to_string(res.itinerary.symbols[k])});
    write_text(cfg.out_dir + "/itinerary.csv", csv.text);

    CommandOutcome oc;
    oc.results["symbols_read"] = res.itinerary.symbols.size();
    if (res.boundary_hit)
        oc.results["boundary_hit"] = *res.boundary_hit;
    else
        oc.results["boundary_hit"] = nullptr;
    json head = json::array();
    for (std::size_t k = 0; k < res.itinerary.symbols.size() && k < 32; ++k)
        head.push_back(res.itinerary.symbols[k]);
    oc.results["head"] = head;
    oc.data_files = {"itinerary.csv"};
    return oc;
}

CommandOutcome run_manifold(const RunConfig& cfg, const PiecewiseMap& map) {
    const std::vector<long> word = resolved_word(cfg, map, cfg.depth);
    const Itinerary past = make_word(word, Orientation::Backward);
    const ManifoldResult mr = unstable_manifold(map, past, cfg.tolerance, 64, cfg.grid);
    const CurvatureBudget budget = curvature_budget(map, word);

    Csv csv("x,g,dg,d2g  (converged unstable manifold graph on a uniform grid)");
    for (int k = 0; k < mr.curve.n(); ++k)
        csv.row({num(mr.curve.x_at(k)), num(mr.curve.g[k]), num(mr.curve.dg[k]),
                 num(mr.curve.d2g[k])});
    write_text(cfg.out_dir + "/manifold.csv", csv.text);

    double sup_dg = 0.0;
    for (double d : mr.curve.dg) sup_dg = std::max(sup_dg, std::fabs(d));

    CommandOutcome oc;
    oc.results["word"] = word;
    oc.results["iterations"] = mr.diag.d0.size();
    oc.results["d0_final"] = mr.diag.d0.empty() ? 0.0 : mr.diag.d0.back();
    oc.results["d1_final"] = mr.diag.d1.empty() ? 0.0 : mr.diag.d1.back();
    oc.results["d2_final"] = mr.diag.d2.empty() ? 0.0 : mr.diag.d2.back();
    oc.results["sup_dg"] = sup_dg;
    oc.results["cone_margin"] = map.cone.alpha - sup_dg;
    json b;
    b["a1"] = budget.a1;
    b["a2"] = budget.a2;
    b["k2"] = budget.k2;
    b["slope_budget_slack"] = budget.slope_budget_slack;
    oc.results["curvature"] = b;
    oc.status = (sup_dg <= map.cone.alpha) ? 0 : 1;
    oc.data_files = {"manifold.csv"};
    return oc;
}

CommandOutcome run_distortion(const RunConfig& cfg, const PiecewiseMap& map) {
    const std::vector<long> word = resolved_word(cfg, map, cfg.depth);
    const long deep = static_cast<long>(word.size());
    const long shallow = std::max<long>(1, deep / 2);
    const double C = calibrate_fluctuation_constant(map, 400, cfg.seed);
    const CurveGraph gamma = CurveGraph::constant(cfg.y);

    Csv csv("depth,theta,ratio_max,ratio_min,bound_rhs  (derivative-ratio spread of the "
            "depth-n branch composition along the probe curve)");
    json per_depth;
    bool envelope_ok = true;
    DistortionReport shallow_rep, deep_rep;
    for (const long d : {shallow, deep}) {
        const std::vector<long> prefix(word.begin(), word.begin() + d);
        const Cylinder cyl = make_post_cylinder(map, make_word(prefix, Orientation::Forward));
        const DistortionReport rep = composition_distortion(map, gamma, cyl, d, C);
        csv.row({std::to_string(rep.depth), num(rep.theta), num(rep.ratio_max),
                 num(rep.ratio_min), num(rep.bound_rhs)});
        json r;
        r["theta"] = rep.theta;
        r["ratio_max"] = rep.ratio_max;
        r["ratio_min"] = rep.ratio_min;
        r["bound_rhs"] = rep.bound_rhs;
        per_depth[std::to_string(rep.depth)] = r;
        if (rep.ratio_max > rep.bound_rhs) envelope_ok = false;
        (d == shallow ? shallow_rep : deep_rep) = rep;
    }
    write_text(cfg.out_dir + "/distortion.csv", csv.text);

    CommandOutcome oc;
    oc.results["word"] = word;
    oc.results["constant"] = C;
    oc.results["depths"] = per_depth;
    oc.results["plateau_rel"] = deep_rep.ratio_max / shallow_rep.ratio_max - 1.0;
    oc.results["envelope_ok"] = envelope_ok;
    oc.status = envelope_ok ? 0 : 1;
    oc.data_files = {"distortion.csv"};
    return oc;
}

CommandOutcome run_srb(const RunConfig& cfg, const PiecewiseMap& map, bool pushforward) {
    EmpiricalMeasure em;
    json setup;
    if (pushforward) {
        const std::vector<long> word = resolved_word(cfg, map, cfg.density_depth + 4);
        const Itinerary past = make_word(word, Orientation::Backward);
        em = pushforward_srb(map, past, cfg.n, cfg.grid, cfg.points, cfg.density_depth,
                             cfg.stride, cfg.threads, cfg.seed);
        setup["word"] = word;
    } else {
        em = birkhoff_srb(map, default_seeds(cfg.seed_count, cfg.seed), cfg.n, cfg.grid,
                          cfg.burn_in, cfg.stride, cfg.threads, cfg.seed);
    }
    write_histogram_csv(cfg.out_dir + "/histogram.csv", em);

    CommandOutcome oc;
    oc.results = measure_to_json(em);
    for (const auto& item : setup.items()) oc.results[item.key()] = item.value();
    oc.status = 0;
    if (cfg.expect_uniform == 1) {
        const ChiSquareResult chi =
            chi_square_uniform(em.mass, static_cast<double>(em.samples));
        json cj;
        cj["statistic"] = chi.statistic;
        cj["dof"] = chi.dof;
        cj["p_value"] = chi.p_value;
        cj["significance"] = cfg.tolerance;
        cj["pass"] = chi.pass(cfg.tolerance);
        oc.results["chi_square"] = cj;
        if (!chi.pass(cfg.tolerance)) oc.status = 1;
    }
    oc.data_files = {"histogram.csv"};
    return oc;
}

CommandOutcome run_holonomy(const RunConfig& cfg, const PiecewiseMap& map) {
    const HolonomyReport rep = holonomy_test(map, CurveGraph::constant(cfg.y_gamma),
                                             CurveGraph::constant(cfg.y_eta), cfg.depth,
                                             cfg.pairs, cfg.seed);

    Csv csv("z_x,z_y,pi_x,pi_y,density,deriv_ratio  (stable-holonomy matches between the "
            "two transversals)");
    for (const HolonomyPair& p : rep.pairs)
        csv.row({num(p.z.x), num(p.z.y), num(p.pi_z.x), num(p.pi_z.y), num(p.density),
                 num(p.deriv_ratio)});
    write_text(cfg.out_dir + "/holonomy_pairs.csv", csv.text);

    CommandOutcome oc;
    oc.results["pairs_kept"] = rep.pairs.size();
    oc.results["dropped"] = rep.dropped;
    oc.results["depth"] = rep.depth;
    oc.results["density_min"] = rep.density_min;
    oc.results["density_max"] = rep.density_max;
    oc.results["ratio_min"] = rep.ratio_min;
    oc.results["ratio_max"] = rep.ratio_max;
    oc.status = (rep.density_min > 0.0) ? 0 : 1;
    oc.data_files = {"holonomy_pairs.csv"};
    return oc;
}

CommandOutcome run_entropy(const RunConfig& cfg, const PiecewiseMap& map) {
    const bool all = cfg.route == "all";
    json routes;
    Csv csv("route,value,spread,n,seeds_used,seeds_dropped");
    CommandOutcome oc;
    oc.data_files = {"entropy_routes.csv"};

    const auto record = [&](const EntropyEstimate& est) {
        routes[est.route] = estimate_to_json(est);
        csv.row({est.route, num(est.value), num(est.spread), std::to_string(est.n),
                 std::to_string(est.seeds_used), std::to_string(est.seeds_dropped)});
    };

    if (all || cfg.route == "derivative_growth")
        record(entropy_derivative_growth(map, default_seeds(cfg.seed_count, cfg.seed), cfg.n,
                                         cfg.threads, cfg.seed));
    if (all || cfg.route == "integral")
        record(entropy_integral(map, default_seeds(cfg.seed_count, cfg.seed), cfg.n,
                                cfg.burn_in, cfg.threads, cfg.seed));
    if (all || cfg.route == "directional")
        record(entropy_directional(map, {cfg.x, cfg.y}, {cfg.v1, cfg.v2}, cfg.n, cfg.seed));
    if (all || cfg.route == "cylinder") {
        const CylinderEntropy ce =
            entropy_cylinder(map, {cfg.x, cfg.y}, 1, cfg.depth, cfg.n, cfg.seed);
        record(ce.estimate);
        Csv depths("depth,value,visits  (visit-frequency entropy of the orbit's own "
                   "nested cylinders)");
        json by_depth = json::array();
        for (const CylinderEntropyPoint& p : ce.by_depth) {
            depths.row({std::to_string(p.depth), num(p.value), std::to_string(p.visits)});
            json pj;
            pj["depth"] = p.depth;
            pj["value"] = p.value;
            pj["visits"] = p.visits;
            by_depth.push_back(pj);
        }
        write_text(cfg.out_dir + "/cylinder_depths.csv", depths.text);
        oc.results["cylinder_by_depth"] = by_depth;
        oc.data_files.push_back("cylinder_depths.csv");
    }

    write_text(cfg.out_dir + "/entropy_routes.csv", csv.text);
    oc.results["routes"] = routes;
    return oc;
}

CommandOutcome dispatch(const RunConfig& cfg, const PiecewiseMap& map) {
    if (cfg.command == "check") return run_check(cfg, map);
    if (cfg.command == "itinerary") return run_itinerary(cfg, map);
    if (cfg.command == "manifold") return run_manifold(cfg, map);
    if (cfg.command == "distortion") return run_distortion(cfg, map);
    if (cfg.command == "srb-birkhoff") return run_srb(cfg, map, false);
    if (cfg.command == "srb-pushforward") return run_srb(cfg, map, true);
    if (cfg.command == "holonomy") return run_holonomy(cfg, map);
    return run_entropy(cfg, map);
}

}  // namespace

PiecewiseMap resolve_family(const FamilySpec& spec) {
    PiecewiseMap map;
    if (spec.kind == "baker") {
        map = baker(spec.branches);
    } else if (spec.kind == "lueroth") {
        map = spec.n_max > 0 ? lueroth(spec.n_max) : lueroth();
    } else if (spec.kind == "perturbed_lueroth") {
        map = perturbed_lueroth(spec.eps, spec.n_max > 0 ? spec.n_max : 100000000L);
    } else if (spec.kind == "custom") {
        map = custom_family(spec.custom, {spec.alpha, spec.k0},
                            spec.c0 > 0.0 ? spec.c0 : 1.0);
    } else {
        fail(Err::ConfigInvalid, "unknown family kind \"" + spec.kind + "\"");
    }
    if (spec.alpha > 0.0) map.cone.alpha = spec.alpha;
    if (spec.k0 > 0.0) map.cone.K0 = spec.k0;
    map.cone.validate();
    if (spec.c0 > 0.0) map.C0 = spec.c0;
    if (spec.power > 1) map = power_map(map, spec.power, spec.power_depth_limit);
    return map;
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        fail(Err::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j,
                 {"command", "family", "seed", "threads", "out_dir", "n", "grid", "depth",
                  "seed_count", "burn_in", "stride", "points", "density_depth", "pairs", "route",
                  "tolerance", "x", "y", "v1", "v2", "y_gamma", "y_eta", "word",
                  "strict_interior", "expect_uniform"},
                 "config");
    RunConfig c;
    read_field(j, "command", c.command);
    if (j.contains("family")) c.family = family_from_json(j.at("family"));
    read_field(j, "seed", c.seed);
    read_field(j, "threads", c.threads);
    read_field(j, "out_dir", c.out_dir);
    read_field(j, "n", c.n);
    read_field(j, "grid", c.grid);
    read_field(j, "depth", c.depth);
    read_field(j, "seed_count", c.seed_count);
    read_field(j, "burn_in", c.burn_in);
    read_field(j, "stride", c.stride);
    read_field(j, "points", c.points);
    read_field(j, "density_depth", c.density_depth);
    read_field(j, "pairs", c.pairs);
    read_field(j, "route", c.route);
    read_field(j, "tolerance", c.tolerance);
    read_field(j, "x", c.x);
    read_field(j, "y", c.y);
    read_field(j, "v1", c.v1);
    read_field(j, "v2", c.v2);
    read_field(j, "y_gamma", c.y_gamma);
    read_field(j, "y_eta", c.y_eta);
    read_field(j, "word", c.word);
    read_field(j, "strict_interior", c.strict_interior);
    read_field(j, "expect_uniform", c.expect_uniform);
    return c;
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["family"] = family_to_json(c.family);
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["out_dir"] = c.out_dir;
    j["n"] = c.n;
    j["grid"] = c.grid;
    j["depth"] = c.depth;
    j["seed_count"] = c.seed_count;
    j["burn_in"] = c.burn_in;
    j["stride"] = c.stride;
    j["points"] = c.points;
    j["density_depth"] = c.density_depth;
    j["pairs"] = c.pairs;
    j["route"] = c.route;
    j["tolerance"] = c.tolerance;
    j["x"] = c.x;
    j["y"] = c.y;
    j["v1"] = c.v1;
    j["v2"] = c.v2;
    j["y_gamma"] = c.y_gamma;
    j["y_eta"] = c.y_eta;
    j["word"] = c.word;
    j["strict_interior"] = c.strict_interior;
    j["expect_uniform"] = c.expect_uniform;
    return j.dump(2);
}

int run(const RunConfig& config) {
    RunConfig cfg = config;
    fill_defaults(cfg);
    validate_config(cfg);
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) fail(Err::ConfigInvalid, "cannot create out_dir " + cfg.out_dir);

    json summary;
    summary["command"] = cfg.command;
    summary["config"] = json::parse(config_to_json(cfg));
    int status = 0;
    try {
        const PiecewiseMap map = resolve_family(cfg.family);
        CommandOutcome oc = dispatch(cfg, map);
        summary["results"] = oc.results;
        oc.data_files.push_back("summary.json");
        std::sort(oc.data_files.begin(), oc.data_files.end());
        summary["artifacts"] = oc.data_files;
        status = oc.status;
        summary["status"] = status == 0 ? "ok" : "condition_failure";
    } catch (const SrbError& e) {
        json err;
        err["code"] = err_code(e.code());
        err["message"] = e.what();
        summary["error"] = err;
        summary["status"] = "error";
        status = 2;
    } catch (const std::exception& e) {
        json err;
        err["code"] = "internal";
        err["message"] = e.what();
        summary["error"] = err;
        summary["status"] = "error";
        status = 2;
    }

    const std::string text = summary.dump(2) + "\n";
    write_text(cfg.out_dir + "/summary.json", text);
    std::fwrite(text.data(), 1, text.size(), stdout);
    return status;
}

}  // namespace srblab
