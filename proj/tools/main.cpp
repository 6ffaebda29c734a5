// Command-line front end: parses the subcommand and the shared flags, loads
// the optional JSON config, applies flag overrides, and delegates to run().
// Exit status: 0 success, 1 a checked condition failed, 2 configuration or
// execution error (reported as a JSON error object on stdout).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "srblab/error.hpp"
#include "srblab/run.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) srblab::fail(srblab::Err::ConfigInvalid, "cannot read config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SRB-measure laboratory for piecewise-smooth hyperbolic maps "
                 "of the unit square"};
    app.require_subcommand(1);

    std::string config_path, out_dir, route;
    unsigned long long seed = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "rng seed override");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--threads", threads, "worker thread count override");

    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"check", "verify hyperbolicity, distortion, and partition conditions"},
        {"itinerary", "read the branch symbols of a forward orbit"},
        {"manifold", "converge the unstable manifold of a backward word"},
        {"distortion", "derivative-ratio spread of deep branch compositions"},
        {"srb-birkhoff", "histogram long forward orbits of a seed ensemble"},
        {"srb-pushforward", "time-average pushforwards of a density-weighted cloud"},
        {"holonomy", "compare transversals through stable-holonomy matching"},
        {"entropy", "growth-rate estimates along orbits"},
    };
    CLI::App* entropy_cmd = nullptr;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->fallthrough();
        if (std::string(c.name) == "entropy") entropy_cmd = sub;
    }
    entropy_cmd->add_option(
        "--route", route, "derivative_growth | directional | cylinder | integral | all");

    CLI11_PARSE(app, argc, argv);

    try {
        srblab::RunConfig cfg;
        if (!config_path.empty()) cfg = srblab::config_from_json(read_file(config_path));
        cfg.command = app.get_subcommands().front()->get_name();
        if (app.count("--seed") > 0) cfg.seed = seed;
        if (app.count("--threads") > 0) cfg.threads = threads;
        if (app.count("--out") > 0) cfg.out_dir = out_dir;
        if (entropy_cmd->count("--route") > 0) cfg.route = route;
        return srblab::run(cfg);
    } catch (const srblab::SrbError& e) {
        nlohmann::json err;
        err["status"] = "error";
        err["error"]["code"] = srblab::err_code(e.code());
        err["error"]["message"] = e.what();
        const std::string text = err.dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 2;
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["status"] = "error";
        err["error"]["code"] = "internal";
        err["error"]["message"] = e.what();
        const std::string text = err.dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), stdout);
        return 2;
    }
}
