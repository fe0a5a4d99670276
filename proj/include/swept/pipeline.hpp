#pragma once
// End-to-end runs: discretize -> propagate -> extract -> assemble, the
// stamping baseline, references for metrics and resolution sweeps.

#include "swept/metrics.hpp"
#include "swept/stamping.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

namespace swept {

enum class Method { Ours, Stamping };

inline std::string to_string(Method m) { return m == Method::Ours ? "ours" : "stamping"; }
inline Method method_from_string(const std::string &s) {
    if (s == "ours") return Method::Ours;
    if (s == "stamping") return Method::Stamping;
    throw ValidationError("config", "unknown method '" + s + "' (expected ours|stamping)");
}

/// Every setting of one run. Defaults match the reference experiments.
struct RunConfig {
    nlohmann::json mesh;          // OBJ path (relative to base_dir) or {"primitive": ...}
    std::string base_dir = ".";
    Trajectory trajectory = Trajectory::stationary();
    int grid_resolution = 256;
    int time_steps = 50;
    int seeds_per_interval = 100;
    uint64_t rng_seed = 1;
    int threads = 0; // 0: SWEPT_THREADS or hardware concurrency
    std::string output;
    Method method = Method::Ours;
    int interior_samples = 10;
    bool propagate_all_positive = false;
    std::optional<nlohmann::json> reference;
    int metrics_samples = 100000;

    void validate() const {
        if (grid_resolution < 5) throw ValidationError("config", "grid_resolution must be >= 5");
        if (time_steps < 1) throw ValidationError("config", "time_steps must be >= 1");
        if (seeds_per_interval < 1) throw ValidationError("config", "seeds_per_interval must be >= 1");
        if (interior_samples < 2) throw ValidationError("config", "interior_samples must be >= 2");
        if (threads < 0) throw ValidationError("config", "threads must be >= 0");
        if (metrics_samples < 1) throw ValidationError("config", "metrics_samples must be >= 1");
        if (mesh.is_null()) throw ValidationError("config", "missing 'mesh'");
    }
};

/// Keys accepted in a run config, with defaults, for help output.
inline const std::vector<std::pair<std::string, std::string>> &config_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"mesh", "OBJ path or {\"primitive\":\"icosphere\"|\"box\", ...} (required)"},
        {"trajectory", "{\"type\":\"static\"|\"translation\"|\"circular\"|\"screw\"|\"rotation\"|\"keyframes\", ...} (default static)"},
        {"grid_resolution", "256"},
        {"time_steps", "50"},
        {"seeds_per_interval", "100"},
        {"rng_seed", "1"},
        {"threads", "0 (SWEPT_THREADS, else all cores)"},
        {"output", "\"\" (no OBJ written)"},
        {"method", "\"ours\" | \"stamping\" (default ours)"},
        {"interior_samples", "10"},
        {"propagate_all_positive", "false"},
        {"reference", "{\"type\":\"sphere_circle\"|\"sphere\"|\"box\"|\"mesh\", ...} (optional, enables CD/HD)"},
        {"metrics_samples", "100000"},
    };
    return keys;
}

inline RunConfig config_from_json(const nlohmann::json &j, const std::string &base_dir = ".") {
    if (!j.is_object()) throw ValidationError("config", "config must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto &keys = config_keys();
        if (std::none_of(keys.begin(), keys.end(), [&](const auto &k) { return k.first == it.key(); }))
            throw ValidationError("config", "unknown key '" + it.key() + "'");
    }
    RunConfig c;
    c.base_dir = base_dir;
    try {
        if (j.contains("mesh")) c.mesh = j.at("mesh");
        if (j.contains("trajectory")) c.trajectory = trajectory_from_json(j.at("trajectory"));
        c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
        c.time_steps = j.value("time_steps", c.time_steps);
        c.seeds_per_interval = j.value("seeds_per_interval", c.seeds_per_interval);
        c.rng_seed = j.value("rng_seed", c.rng_seed);
        c.threads = j.value("threads", c.threads);
        c.output = j.value("output", c.output);
        if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
        c.interior_samples = j.value("interior_samples", c.interior_samples);
        c.propagate_all_positive = j.value("propagate_all_positive", c.propagate_all_positive);
        if (j.contains("reference")) c.reference = j.at("reference");
        c.metrics_samples = j.value("metrics_samples", c.metrics_samples);
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("config", std::string("bad value: ") + e.what());
    }
    c.validate();
    return c;
}

inline nlohmann::json config_to_json(const RunConfig &c) {
    nlohmann::json j = {{"mesh", c.mesh},
                        {"trajectory", trajectory_to_json(c.trajectory)},
                        {"grid_resolution", c.grid_resolution},
                        {"time_steps", c.time_steps},
                        {"seeds_per_interval", c.seeds_per_interval},
                        {"rng_seed", c.rng_seed},
                        {"threads", c.threads},
                        {"output", c.output},
                        {"method", to_string(c.method)},
                        {"interior_samples", c.interior_samples},
                        {"propagate_all_positive", c.propagate_all_positive},
                        {"metrics_samples", c.metrics_samples}};
    if (c.reference) j["reference"] = *c.reference;
    return j;
}

inline RunConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("config", path + ": " + e.what());
    }
    return config_from_json(j, std::filesystem::path(path).parent_path().string());
}

inline SurfaceMesh model_surface(const RunConfig &c) {
    if (c.mesh.is_string()) {
        std::filesystem::path p = c.mesh.get<std::string>();
        if (p.is_relative() && !c.base_dir.empty()) p = std::filesystem::path(c.base_dir) / p;
        return read_obj(p.string());
    }
    try {
        const std::string kind = c.mesh.at("primitive").get<std::string>();
        if (kind == "icosphere") {
            Vec3 center = Vec3::Zero();
            if (c.mesh.contains("center")) center = detail::vec3_from_json(c.mesh, "center");
            return primitives::icosphere(c.mesh.at("radius").get<double>(), c.mesh.value("subdivisions", 4), center);
        }
        if (kind == "box") return primitives::box(detail::vec3_from_json(c.mesh, "min"), detail::vec3_from_json(c.mesh, "max"));
        throw ValidationError("config", "unknown primitive '" + kind + "'");
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("config", std::string("bad mesh entry: ") + e.what());
    }
}

inline std::unique_ptr<Reference> make_reference(const nlohmann::json &j, const std::string &base_dir = ".") {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "sphere_circle") return std::make_unique<SphereCircleReference>(j.at("R").get<double>(), j.at("r").get<double>());
        if (type == "sphere") {
            Vec3 c = Vec3::Zero();
            if (j.contains("center")) c = detail::vec3_from_json(j, "center");
            return std::make_unique<SphereReference>(c, j.at("radius").get<double>());
        }
        if (type == "box") return std::make_unique<BoxReference>(detail::vec3_from_json(j, "min"), detail::vec3_from_json(j, "max"));
        if (type == "mesh") {
            std::filesystem::path p = j.at("path").get<std::string>();
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            return std::make_unique<MeshReference>(read_obj(p.string()));
        }
        throw ValidationError("config", "unknown reference type '" + type + "'");
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("config", std::string("bad reference entry: ") + e.what());
    }
}

struct PhaseTimes {
    double discretize = 0, propagate = 0, extract = 0, assemble = 0, total = 0;
};

struct MetricsReport {
    std::optional<double> chamfer_permille; // per mille of reference bbox diagonal
    std::optional<double> hausdorff_percent;
    double seconds = 0;
    size_t open_edges = 0;
    size_t triangles = 0;
    PhaseTimes phases;
    PropagationStats propagation;
    StampStats stamping;
};

inline nlohmann::json to_json(const MetricsReport &r, Method m) {
    nlohmann::json j;
    j["method"] = to_string(m);
    j["chamfer_l1_permille"] = r.chamfer_permille ? nlohmann::json(*r.chamfer_permille) : nlohmann::json();
    j["hausdorff_percent"] = r.hausdorff_percent ? nlohmann::json(*r.hausdorff_percent) : nlohmann::json();
    j["seconds"] = r.seconds;
    j["open_edges"] = r.open_edges;
    j["triangles"] = r.triangles;
    j["phases"] = {{"discretize", r.phases.discretize}, {"propagate", r.phases.propagate},
                   {"extract", r.phases.extract}, {"assemble", r.phases.assemble}};
    if (m == Method::Ours)
        j["propagation"] = {{"seeds", r.propagation.seeds}, {"events", r.propagation.events_popped},
                            {"fields_evaluated", r.propagation.fields_evaluated},
                            {"fields_stored", r.propagation.fields_stored}, {"fields_evicted", r.propagation.fields_evicted},
                            {"vertex_queries", r.propagation.vertex_queries}};
    else
        j["stamping"] = {{"vertices_evaluated", r.stamping.vertices_evaluated}, {"surface_cells", r.stamping.surface_cells}};
    return j;
}

struct RunResult {
    SurfaceMesh mesh;
    MetricsReport report;
    std::optional<TetGrid> grid;
    PropagationResult fields; // empty for stamping
};

namespace detail {
class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - m_last).count();
        m_last = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point m_last = std::chrono::steady_clock::now();
};

template <typename F>
auto staged(const char *stage, F &&f) {
    try {
        return f();
    } catch (const Error &) {
        throw;
    } catch (const std::exception &e) {
        throw Error(stage, e.what());
    }
}
} // namespace detail

/// Grid for a run: swept bounding box of the model, padded by two cells.
inline TetGrid run_grid(const TriangleMesh &model, const RunConfig &c) {
    return fit_grid(swept_bounds(model.bounds(), c.trajectory, 4 * static_cast<size_t>(c.time_steps)), c.grid_resolution);
}

inline void finish_report(RunResult &r, const RunConfig &c, double seconds) {
    r.report.seconds = seconds;
    r.report.phases.total = seconds;
    r.report.triangles = r.mesh.triangles.size();
    r.report.open_edges = open_edge_count(r.mesh);
    if (c.reference && !r.mesh.triangles.empty()) {
        const auto ref = make_reference(*c.reference, c.base_dir);
        const SurfaceError e = compute_metrics(r.mesh, *ref, static_cast<size_t>(c.metrics_samples), 12345,
                                               detail::resolve_threads(c.threads));
        r.report.chamfer_permille = e.chamfer_permille();
        r.report.hausdorff_percent = e.hausdorff_percent();
    }
    if (!c.output.empty()) write_obj(c.output, r.mesh);
}

/// The multi-field method. Keeps the grid and stored fields for auditing.
inline RunResult run_sweep(const RunConfig &c) {
    c.validate();
    RunResult r;
    detail::Stopwatch clock;
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = detail::resolve_threads(c.threads);

    const MeshDistance mesh = detail::staged("mesh", [&] { return MeshDistance(TriangleMesh(model_surface(c))); });
    const TetGrid grid = detail::staged("grid", [&] { return run_grid(mesh.mesh(), c); });
    const auto intervals = discretize(static_cast<size_t>(c.time_steps));
    r.report.phases.discretize = clock.lap();

    PropagationOptions opt;
    opt.interior_samples = c.interior_samples;
    opt.seeds_per_interval = static_cast<size_t>(c.seeds_per_interval);
    opt.rng_seed = c.rng_seed;
    opt.propagate_all_positive = c.propagate_all_positive;
    r.fields = detail::staged("propagate", [&] { return propagate(grid, mesh, c.trajectory, intervals, opt); });
    r.report.propagation = r.fields.stats;
    r.report.phases.propagate = clock.lap();

    // Per-tet extraction is independent; chunk outputs are concatenated in
    // chunk order so the result does not depend on the thread count.
    constexpr size_t kChunks = 512;
    std::vector<std::vector<std::array<Vec3, 3>>> chunkSoup(kChunks);
    const auto &tets = r.fields.tets;
    detail::parallel_chunks(tets.size(), kChunks, threads, [&](size_t chunk, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i)
            triangulate_patches(extract_tet_surface(grid.tet_vertices(tets[i].tet), tets[i].fields), chunkSoup[chunk]);
    });
    r.report.phases.extract = clock.lap();

    std::vector<std::array<Vec3, 3>> soup;
    for (auto &s : chunkSoup) soup.insert(soup.end(), s.begin(), s.end());
    r.mesh = assemble_triangles(soup, grid.cell_size());
    r.report.phases.assemble = clock.lap();
    r.grid = grid;
    finish_report(r, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return r;
}

/// Baseline: N+1 posed copies of the model SDF folded by min.
inline RunResult run_stamping(const RunConfig &c) {
    c.validate();
    RunResult r;
    detail::Stopwatch clock;
    const auto start = std::chrono::steady_clock::now();
    const MeshDistance mesh = detail::staged("mesh", [&] { return MeshDistance(TriangleMesh(model_surface(c))); });
    const TetGrid grid = detail::staged("grid", [&] { return run_grid(mesh.mesh(), c); });
    const auto inverses = endpoint_inverses(c.trajectory, discretize(static_cast<size_t>(c.time_steps)));
    r.report.phases.discretize = clock.lap();

    StampOptions opt;
    opt.threads = detail::resolve_threads(c.threads);
    r.mesh = detail::staged("stamping", [&] {
        return stamp_surface(grid, inverses, [&](const Vec3 &p) { return mesh.signed_distance(p); }, opt, &r.report.stamping);
    });
    r.report.phases.extract = clock.lap();
    r.grid = grid;
    finish_report(r, c, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return r;
}

inline RunResult run(const RunConfig &c) { return c.method == Method::Ours ? run_sweep(c) : run_stamping(c); }

struct SweepRow {
    int grid = 0, steps = 0;
    MetricsReport report;
    std::string error; // non-empty when this cell failed
};

/// One run per (grid, steps) pair, grids outermost.
inline std::vector<SweepRow> resolution_sweep(const RunConfig &base, const std::vector<int> &grids, const std::vector<int> &steps) {
    if (grids.empty() || steps.empty()) throw ValidationError("config", "resolution sweep needs grids and steps");
    std::vector<SweepRow> rows;
    for (int g : grids)
        for (int s : steps) {
            RunConfig c = base;
            c.grid_resolution = g;
            c.time_steps = s;
            c.output.clear();
            SweepRow row{g, s, {}, {}};
            try {
                row.report = run(c).report;
            } catch (const std::exception &e) {
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    return rows;
}

inline void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows) {
    out << "grid,steps,cd_permille,hd_percent,seconds,open_edges,tris\n";
    auto opt = [](const std::optional<double> &v) { return v ? std::to_string(*v) : std::string(); };
    for (const auto &r : rows) {
        if (!r.error.empty()) {
            out << r.grid << ',' << r.steps << ",,,,,\n";
            continue;
        }
        out << r.grid << ',' << r.steps << ',' << opt(r.report.chamfer_permille) << ',' << opt(r.report.hausdorff_percent)
            << ',' << r.report.seconds << ',' << r.report.open_edges << ',' << r.report.triangles << '\n';
    }
}

} // namespace swept
