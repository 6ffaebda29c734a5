// Deterministic run orchestration behind the command-line tool. A RunConfig
// selects one subcommand, a map family, and the command parameters; run()
// executes it, writes a JSON summary plus CSV data files into out_dir, and
// returns the process exit status: 0 on success, 1 when a checked condition
// reports a negative margin or a failed statistical gate, 2 on errors.
// Identical configs produce byte-identical outputs; nothing is timestamped.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srblab/expr_family.hpp"
#include "srblab/family.hpp"

namespace srblab {

// Which map to build. kind selects a built-in family or "custom" (an
// expression-defined family; custom.{x_left,...} then carry the branch
// description). Zeros mean "use the family's default" for n_max, cone, and
// C0. power > 1 wraps the family in its power map.
struct FamilySpec {
    std::string kind = "baker";  // baker | lueroth | perturbed_lueroth | custom
    int branches = 2;            // baker branch count
    double eps = 0.01;           // perturbed_lueroth amplitude
    long n_max = 0;              // branch enumeration cap (0 = family default)
    double alpha = 0.0;          // cone half-opening (0 = family default)
    double k0 = 0.0;             // expansion constant (0 = family default)
    double c0 = 0.0;             // distortion bound (0 = family default)
    int power = 1;               // composition power
    long power_depth_limit = 4096;
    ExprFamilyConfig custom;
};

PiecewiseMap resolve_family(const FamilySpec& spec);

struct RunConfig {
    std::string command;  // check | itinerary | manifold | distortion |
                          // srb-birkhoff | srb-pushforward | holonomy | entropy
    FamilySpec family;
    std::uint64_t seed = 20260814;
    int threads = 0;  // 0 = take SRBLAB_THREADS, else 1
    std::string out_dir = ".";

    long n = 0;             // orbit length / window / series terms (0 = default)
    int grid = 0;           // histogram bins per side, curve grid, sample grid
    long depth = 0;         // backward depth / cylinder depth
    int seed_count = 64;    // ensemble size for orbit estimators
    long burn_in = 1000;    // birkhoff / integral-entropy settling window
    long stride = 1;        // histogram sampling stride
    long points = 4096;     // pushforward cloud size
    long density_depth = 20;
    int pairs = 64;         // holonomy sample pairs
    std::string route = "all";  // entropy route or "all"
    double tolerance = 0.0;     // command-specific gate (0 = default)
    double x = 0.37, y = 0.41;  // base point for pointwise commands
    double v1 = 1.0, v2 = 0.0;  // direction for the directional route
    double y_gamma = 0.35;      // holonomy transversal heights
    double y_eta = 0.65;
    std::vector<long> word;  // explicit itinerary; empty = seeded random
    bool strict_interior = true;
    int expect_uniform = -1;  // chi-square gate: -1 auto, 0 off, 1 on
};

// Parses and schema-validates a JSON config document. Unknown keys, wrong
// types, and out-of-range values throw ConfigInvalid.
RunConfig config_from_json(const std::string& text);

// The resolved config (defaults filled in) as the JSON object embedded in
// every summary.
std::string config_to_json(const RunConfig& config);

// Executes the configured subcommand. Artifacts land in config.out_dir:
// always summary.json (which is also echoed to stdout), plus the command's
// CSV data files. Module errors are caught, recorded in the summary as
// {code, message} using the machine-readable code strings, and reported via
// exit status 2.
int run(const RunConfig& config);

}  // namespace srblab
