// Command-line driver: sweep, stamp, metrics, ablate, validate-mesh.
//
// Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime failure.

#include "swept/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace swept;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string config;
    std::optional<int> grid, steps, seeds, threads;
    std::optional<uint64_t> rng_seed;
    std::optional<std::string> method, out;
    bool dry_run = false;
};

void add_run_flags(CLI::App *cmd, Overrides &o, bool with_method) {
    cmd->add_option("--config", o.config, "Run config (JSON)")->required();
    cmd->add_option("--grid", o.grid, "Grid resolution (cells per axis)");
    cmd->add_option("--steps", o.steps, "Number of time steps");
    cmd->add_option("--seeds", o.seeds, "Seeds per interval");
    cmd->add_option("--rng-seed", o.rng_seed, "Seed selection RNG seed");
    cmd->add_option("--threads", o.threads, "Worker threads (0: SWEPT_THREADS, else all cores)");
    if (with_method) cmd->add_option("--method", o.method, "ours | stamping");
    cmd->add_option("--out", o.out, "Output OBJ path");
    cmd->add_flag("--dry-run", o.dry_run, "Print the resolved config and exit");
}

RunConfig resolve(const Overrides &o) {
    if (!fs::exists(o.config)) throw UsageError("config file '" + o.config + "' not found");
    RunConfig c = load_config(o.config);
    if (o.grid) c.grid_resolution = *o.grid;
    if (o.steps) c.time_steps = *o.steps;
    if (o.seeds) c.seeds_per_interval = *o.seeds;
    if (o.rng_seed) c.rng_seed = *o.rng_seed;
    if (o.threads) c.threads = *o.threads;
    if (o.method) c.method = method_from_string(*o.method);
    if (o.out) c.output = *o.out;
    if (c.output.empty()) c.output = fs::path(o.config).stem().string() + (c.method == Method::Ours ? ".obj" : ".stamping.obj");
    c.validate();
    return c;
}

std::string sidecar_path(const std::string &obj) {
    fs::path p(obj);
    return (p.parent_path() / p.stem()).string() + ".metrics.json";
}

int run_command(const Overrides &o, std::optional<Method> forced) {
    RunConfig c = resolve(o);
    if (forced) c.method = *forced;
    if (o.dry_run) {
        std::cout << config_to_json(c).dump(2) << '\n';
        return 0;
    }
    const RunResult r = run(c);
    nlohmann::json j = to_json(r.report, c.method);
    j["config"] = config_to_json(c);
    std::ofstream(sidecar_path(c.output)) << j.dump(2) << '\n';
    std::cerr << "wrote " << c.output << " (" << r.report.triangles << " triangles, " << r.report.open_edges
              << " open edges) in " << r.report.seconds << " s\n";
    if (r.report.chamfer_permille)
        std::cerr << "CD " << *r.report.chamfer_permille << " permille, HD " << *r.report.hausdorff_percent << " %\n";
    return 0;
}

std::vector<int> parse_list(const std::string &s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stoi(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception &) {
            throw UsageError("bad list entry '" + tok + "' in '" + s + "'");
        }
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::string help_footer() {
    std::string s = "\nConfig keys (flag > config file > default):\n";
    for (const auto &[k, v] : config_keys()) s += "  " + k + std::string(k.size() < 24 ? 24 - k.size() : 1, ' ') + v + "\n";
    s += "\nEnvironment:\n  SWEPT_THREADS           thread count when neither --threads nor \"threads\" is set\n";
    s += "\nExit codes: 0 ok, 1 usage, 2 validation, 3 runtime failure\n";
    return s;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Swept volumes of rigid motions"};
    app.footer(help_footer());
    app.require_subcommand(1);

    Overrides sweepOpt, stampOpt, ablateOpt;
    auto *sweep = app.add_subcommand("sweep", "Compute a swept volume surface");
    add_run_flags(sweep, sweepOpt, true);
    auto *stamp = app.add_subcommand("stamp", "Stamping baseline (same as sweep --method stamping)");
    add_run_flags(stamp, stampOpt, false);

    auto *ablate = app.add_subcommand("ablate", "Resolution sweep, written as CSV");
    add_run_flags(ablate, ablateOpt, true);
    std::string grids = "25,50,100", steps = "50", csv = "ablation.csv";
    ablate->add_option("--grids", grids, "Comma-separated grid resolutions")->capture_default_str();
    ablate->add_option("--step-list", steps, "Comma-separated time step counts")->capture_default_str();
    ablate->add_option("--csv", csv, "Output CSV path")->capture_default_str();

    auto *metrics = app.add_subcommand("metrics", "Chamfer / Hausdorff of a mesh against a reference");
    std::string metricsMesh, metricsConfig;
    int metricsSamples = 100000;
    metrics->add_option("mesh", metricsMesh, "Result OBJ")->required();
    metrics->add_option("--config", metricsConfig, "Config whose \"reference\" is used")->required();
    metrics->add_option("--samples", metricsSamples, "Samples per side")->capture_default_str();

    auto *validate = app.add_subcommand("validate-mesh", "Check that an OBJ is a closed manifold");
    std::string validatePath;
    validate->add_option("mesh", validatePath, "OBJ file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sweep) return run_command(sweepOpt, std::nullopt);
        if (*stamp) return run_command(stampOpt, Method::Stamping);
        if (*ablate) {
            RunConfig c = resolve(ablateOpt);
            const auto rows = resolution_sweep(c, parse_list(grids), parse_list(steps));
            std::ofstream out(csv);
            write_sweep_csv(out, rows);
            write_sweep_csv(std::cout, rows);
            for (const auto &r : rows)
                if (!r.error.empty()) std::cerr << "grid " << r.grid << " steps " << r.steps << ": " << r.error << '\n';
            return 0;
        }
        if (*metrics) {
            if (!fs::exists(metricsConfig)) throw UsageError("config file '" + metricsConfig + "' not found");
            const RunConfig c = load_config(metricsConfig);
            if (!c.reference) throw ValidationError("config", "config has no \"reference\"");
            const auto ref = make_reference(*c.reference, c.base_dir);
            const SurfaceError e = compute_metrics(read_obj(metricsMesh), *ref, static_cast<size_t>(metricsSamples), 12345,
                                                   detail::resolve_threads(c.threads));
            std::cout << nlohmann::json{{"chamfer_l1_permille", e.chamfer_permille()},
                                        {"hausdorff_percent", e.hausdorff_percent()}}
                             .dump(2)
                      << '\n';
            return 0;
        }
        if (*validate) {
            if (!fs::exists(validatePath)) throw UsageError("mesh file '" + validatePath + "' not found");
            const TriangleMesh m = load_mesh(validatePath, &std::cerr);
            std::cout << "ok: " << m.vertices().size() << " vertices, " << m.num_triangles()
                      << " triangles, closed manifold\n";
            return 0;
        }
    } catch (const UsageError &e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const ValidationError &e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
