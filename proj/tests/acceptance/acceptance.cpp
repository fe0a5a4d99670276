// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Usage: acceptance [criterion numbers...]   (default: all)

#include "swept/pipeline.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#ifndef SWEPT_CONFIG_DIR
#define SWEPT_CONFIG_DIR "configs"
#endif

using namespace swept;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RunConfig config(const std::string &name) { return load_config(std::string(SWEPT_CONFIG_DIR) + "/" + name); }

std::string obj_text(const SurfaceMesh &m) {
    std::ostringstream s;
    write_obj(s, m);
    return s.str();
}

// The torus run at 128^3 is shared by criteria 1, 2 and 7.
const RunResult &torus_run() {
    static const RunResult r = run_sweep(config("torus.json"));
    return r;
}

Outcome torus_reproduction() {
    const auto &r = torus_run().report;
    const double cd = *r.chamfer_permille, hd = *r.hausdorff_percent;
    return {cd <= 0.4 && hd <= 1.5 && r.seconds <= 600,
            fmt("CD %.4f permille (<= 0.4), HD %.4f %% (<= 1.5), %.1f s (<= 600), %zu open edges", cd, hd, r.seconds,
                r.open_edges)};
}

Outcome beats_stamping() {
    RunConfig c = config("torus.json");
    c.method = Method::Stamping;
    const auto stamp = run_stamping(c).report;
    const auto &ours = torus_run().report;
    const bool pass = *ours.chamfer_permille < *stamp.chamfer_permille && *ours.hausdorff_percent < *stamp.hausdorff_percent;
    return {pass, fmt("CD ours %.4f vs stamping %.4f permille; HD ours %.4f vs stamping %.4f %%", *ours.chamfer_permille,
                      *stamp.chamfer_permille, *ours.hausdorff_percent, *stamp.hausdorff_percent)};
}

Outcome minkowski() {
    RunConfig c = config("minkowski.json");
    c.reference.reset();
    const RunResult r = run_sweep(c);
    const SurfaceError e = compute_metrics(r.mesh, BoxReference(Vec3::Zero(), Vec3(2, 1, 1)));
    const double limit = 2 * std::sqrt(3.0) * r.grid->cell_size();
    return {e.hausdorff <= limit, fmt("HD %.5f <= %.5f (2 cell diagonals), %zu open edges", e.hausdorff, limit, r.report.open_edges)};
}

Outcome identity_sweep() {
    RunConfig c = config("identity.json");
    c.reference.reset();
    const RunResult r = run_sweep(c);
    const SurfaceError e = compute_metrics(r.mesh, MeshReference(model_surface(c)));
    const double limit = 1.5 * std::sqrt(3.0) * r.grid->cell_size();
    return {e.hausdorff <= limit, fmt("HD %.5f <= %.5f (1.5 cell diagonals)", e.hausdorff, limit)};
}

Outcome sign_agreement() {
    const RunConfig c = config("torus_64.json");
    const RunResult r = run_sweep(c);
    const TetGrid &g = *r.grid;
    std::map<uint64_t, const TetFieldSet *> byId;
    for (const auto &t : r.fields.tets) byId[g.tet_id(t.tet)] = &t;
    const double R = c.reference->at("R"), rr = c.reference->at("r");

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1);
    const Aabb box = g.bounds();
    size_t tested = 0, agree = 0;
    while (tested < 10000) {
        Vec3 x;
        for (int a = 0; a < 3; ++a) x[a] = box.lo[a] + u(rng) * (box.hi[a] - box.lo[a]);
        const double truth = analytic_sphere_circle_sdf(x, R, rr);
        if (std::abs(truth) <= 2 * g.cell_size()) continue;
        ++tested;
        const TetRef t = g.locate_tet(x);
        const auto it = byId.find(g.tet_id(t));
        const double ours = it == byId.end() ? std::numeric_limits<double>::infinity()
                                             : envelope_value(it->second->fields, g.tet_vertices(t), x);
        agree += (ours < 0) == (truth < 0);
    }
    const double rate = static_cast<double>(agree) / tested;
    return {rate >= 0.999, fmt("%zu / %zu points agree (%.4f%%, >= 99.9%%)", agree, tested, 100 * rate)};
}

double set_distance(const std::vector<Vec3> &a, const std::vector<Vec3> &b) {
    auto directed = [](const std::vector<Vec3> &x, const std::vector<Vec3> &y) {
        double worst = 0;
        for (const auto &p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto &q : y) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

Outcome envelope_equivalence() {
    const TetGrid g(Vec3::Zero(), 0.1, {8, 8, 8});
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<uint64_t> pick(0, g.num_tets() - 1);
    std::uniform_int_distribution<int> count(2, 6);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    double worst = 0;
    size_t mismatched = 0, patches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tet = g.tet_vertices(g.tet_ref(pick(rng)));
        std::vector<DistanceField> fields;
        for (int i = 0, n = count(rng); i < n; ++i) fields.push_back({static_cast<uint32_t>(i), {u(rng), u(rng), u(rng), u(rng)}});
        const auto a = extract_tet_surface(tet, fields, ExtractionRoute::Clip3D);
        const auto b = extract_tet_surface(tet, fields, ExtractionRoute::Cut4D);
        if (a.size() != b.size()) {
            ++mismatched;
            continue;
        }
        patches += a.size();
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i].interval != b[i].interval || a[i].polygon.size() != b[i].polygon.size()) ++mismatched;
            worst = std::max(worst, set_distance(a[i].polygon, b[i].polygon));
        }
    }

    size_t mtMismatch = 0, cut = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tet = g.tet_vertices(g.tet_ref(pick(rng)));
        const std::array<double, 4> d{u(rng), u(rng), u(rng), u(rng)};
        const auto mt = marching_tet(tet, d);
        const auto p = extract_tet_surface(tet, {{0, d}});
        if (mt.empty() != p.empty()) {
            ++mtMismatch;
            continue;
        }
        if (mt.empty()) continue;
        ++cut;
        std::vector<Vec3> pts;
        double area = 0;
        for (const auto &t : mt) {
            pts.insert(pts.end(), t.begin(), t.end());
            area += triangle_area(t[0], t[1], t[2]);
        }
        const auto &poly = p[0].polygon;
        if (p.size() != 1 || poly.size() != mt.size() + 2 || set_distance(poly, pts) > 1e-12 ||
            std::abs(detail::polygon_area(poly) - area) > 1e-12)
            ++mtMismatch;
    }
    const bool pass = mismatched == 0 && worst < 1e-9 && mtMismatch == 0;
    return {pass, fmt("routes: %zu patches, %zu mismatches, max vertex-set distance %.2e (< 1e-9); "
                      "marching tets: %zu cut tets, %zu mismatches",
                      patches, mismatched, worst, cut, mtMismatch)};
}

Outcome competition_audit() {
    size_t defeated = 0, positive = 0, fields = 0;
    for (const auto &t : torus_run().fields.tets) {
        fields += t.fields.size();
        for (const auto &a : t.fields) {
            positive += a.all_positive();
            for (const auto &b : t.fields) defeated += &a != &b && defeats(a, b);
        }
    }
    return {defeated == 0 && positive == 0,
            fmt("%zu stored fields in %zu tets: %zu defeated pairs, %zu all-positive", fields, torus_run().fields.tets.size(),
                defeated, positive)};
}

Outcome temporal_convergence() {
    RunConfig c = config("quarter_turn.json");
    c.reference.reset();
    const auto raw = model_surface(c);
    const Aabb mb = raw.bounds();
    // Oracle: 500 stamps of the exact box SDF at 256^3.
    const TetGrid refGrid = fit_grid(swept_bounds(mb, c.trajectory, 2000), 256);
    StampOptions opt;
    opt.threads = detail::resolve_threads(0);
    const SurfaceMesh reference = stamp_surface(refGrid, endpoint_inverses(c.trajectory, discretize(500)),
                                                [&](const Vec3 &p) { return box_sdf(p, mb.lo, mb.hi); }, opt);
    const MeshReference ref(reference);

    std::vector<double> cd;
    std::string detail;
    for (int steps : {1, 5, 10, 20}) {
        c.time_steps = steps;
        const RunResult r = run_sweep(c);
        cd.push_back(compute_metrics(r.mesh, ref).chamfer_permille());
        detail += fmt("N=%d: %.4f  ", steps, cd.back());
    }
    bool decreasing = true;
    for (size_t i = 1; i < cd.size(); ++i) decreasing &= cd[i] < cd[i - 1];
    const double drop = 1 - cd.back() / cd.front();
    return {decreasing && drop >= 0.1, detail + fmt("(permille; drop %.1f%%, >= 10%%)", 100 * drop)};
}

Outcome determinism() {
    RunConfig c = config("torus_64.json");
    c.reference.reset();
    c.threads = 1;
    const std::string one = obj_text(run_sweep(c).mesh);
    c.threads = 8;
    const std::string eight = obj_text(run_sweep(c).mesh);
    return {one == eight && !one.empty(), fmt("threads 1 vs 8: %zu vs %zu bytes, %s", one.size(), eight.size(),
                                               one == eight ? "identical" : "different")};
}

double box_oracle(const Vec3 &p) {
    double outside2 = 0, inside = -1e300;
    for (int a = 0; a < 3; ++a) {
        const double e = std::max(-0.5 - p[a], p[a] - 0.5);
        if (e > 0) outside2 += e * e;
        inside = std::max(inside, e);
    }
    return outside2 > 0 ? std::sqrt(outside2) : inside;
}

Outcome segment_suite() {
    const MeshDistance cube{TriangleMesh(primitives::box(Vec3::Constant(-0.5), Vec3::Constant(0.5)), nullptr)};
    int failed = 0, total = 0;
    auto near = [&](double a, double b) {
        ++total;
        failed += !(std::abs(a - b) <= 1e-9);
    };
    near(cube.signed_distance(Vec3(2, 0, 0)), 1.5);
    near(cube.signed_distance(Vec3(0, 0, 0)), -0.5);
    near(cube.signed_distance(Vec3(0.6, 0.6, 0.6)), 0.1 * std::sqrt(3.0));
    const auto through = cube.clip_segment_interior({Vec3(-2, 0, 0), Vec3(2, 0, 0)});
    ++total;
    failed += through.size() != 1;
    if (through.size() == 1) {
        near(-2 + 4 * through[0].t0, -0.5);
        near(-2 + 4 * through[0].t1, 0.5);
    }
    ++total;
    failed += !cube.clip_segment_interior({Vec3(2, 0, 0), Vec3(3, 0, 0)}).empty();
    const auto inside = cube.clip_segment_interior({Vec3(-0.2, 0, 0), Vec3(0.2, 0, 0)});
    ++total;
    failed += !(inside.size() == 1 && inside[0].t0 == 0.0 && inside[0].t1 == 1.0);
    near(cube.segment_signed_distance({Vec3(2, 0, 0), Vec3(3, 0, 0)}), 1.5);
    near(cube.segment_signed_distance({Vec3::Zero(), Vec3::Zero()}), -0.5);

    // Dense-sampling oracle restricted to the 10 endpoint-inclusive samples of
    // the inside interval x in [-0.5, 0.5].
    const double ours = cube.segment_signed_distance({Vec3(-2, 0, 0), Vec3(2, 0, 0)}, 10);
    double oracle = 1e300;
    for (int k = 0; k < 10; ++k) oracle = std::min(oracle, box_oracle(Vec3(-0.5 + k / 9.0, 0, 0)));
    near(ours, oracle);
    return {failed == 0, fmt("%d / %d checks at 1e-9; interior sampling %.12f vs oracle %.12f", total - failed, total, ours, oracle)};
}

} // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<const char *, Outcome (*)()>> criteria = {
        {"analytic torus reproduction (128^3, 50 steps)", torus_reproduction},
        {"ours beats stamping (128^3, 50 steps)", beats_stamping},
        {"Minkowski box (64^3, 10 steps)", minkowski},
        {"identity sweep (64^3)", identity_sweep},
        {"sign agreement with analytic torus (64^3)", sign_agreement},
        {"envelope route equivalence", envelope_equivalence},
        {"competition audit (torus 128^3)", competition_audit},
        {"temporal convergence (quarter turn, 128^3)", temporal_convergence},
        {"determinism across thread counts", determinism},
        {"segment distance suite", segment_suite},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[i].first << " -- " << o.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
