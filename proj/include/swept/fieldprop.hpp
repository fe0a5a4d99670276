#pragma once
// Per-tet, per-interval distance fields computed through motion inversion,
// and their seed-driven priority-queue propagation with the defeat rule.

#include "swept/detail/flat_map.hpp"
#include "swept/tetgrid.hpp"

#include <queue>
#include <random>
#include <set>

namespace swept {

/// Signed distances at the four tet vertices to the volume swept during one
/// time interval; linearly interpolated inside the tet.
struct DistanceField {
    uint32_t interval = 0;
    std::array<double, 4> d{};

    double min() const { return std::min(std::min(d[0], d[1]), std::min(d[2], d[3])); }
    bool all_positive() const { return min() > 0; }
    bool same_values(const DistanceField &o) const { return d == o.d; }
};

/// a defeats b: a is strictly smaller at every vertex.
inline bool defeats(const DistanceField &a, const DistanceField &b) {
    return a.d[0] < b.d[0] && a.d[1] < b.d[1] && a.d[2] < b.d[2] && a.d[3] < b.d[3];
}

/// Storage order used by propagation: strict defeat, or identical values with
/// a lower interval index.
inline bool supersedes(const DistanceField &a, const DistanceField &b) {
    return defeats(a, b) || (a.same_values(b) && a.interval < b.interval);
}

struct TetFieldSet {
    TetRef tet;
    std::vector<DistanceField> fields; // sorted by interval
};

/// Signed distance from one lattice point to the volume swept over one
/// interval: the linearized inverse trajectory against the static mesh.
inline double vertex_field_value(const Vec3 &x, const RigidTransform &inv_start, const RigidTransform &inv_end,
                                 const MeshDistance &mesh, int interior_samples) {
    return mesh.segment_signed_distance({inv_start.apply(x), inv_end.apply(x)}, interior_samples);
}

inline DistanceField compute_field(const TetRef &tet, const TimeInterval &interval, const MeshDistance &mesh,
                                   const Trajectory &traj, const TetGrid &grid, int interior_samples = 10) {
    const auto verts = grid.tet_vertices(tet);
    DistanceField f;
    f.interval = static_cast<uint32_t>(interval.index);
    for (int k = 0; k < 4; ++k)
        f.d[k] = mesh.segment_signed_distance(traj.inverse_point_positions(verts[k], interval), interior_samples);
    return f;
}

/// compute_field with per-(lattice vertex, interval) memoization. Not thread safe.
class FieldEvaluator {
public:
    FieldEvaluator(const TetGrid &grid, const MeshDistance &mesh, const Trajectory &traj,
                   const std::vector<TimeInterval> &intervals, int interior_samples)
        : m_grid(grid), m_mesh(mesh), m_inverses(endpoint_inverses(traj, intervals)),
          m_intervals(intervals.size()), m_samples(interior_samples), m_memo(1 << 16) {}

    double vertex_value(uint64_t vertex, size_t interval) {
        auto [slot, fresh] = m_memo.try_emplace(vertex * m_intervals + interval);
        if (fresh) {
            *slot = vertex_field_value(m_grid.vertex_position(vertex), m_inverses[interval], m_inverses[interval + 1],
                                       m_mesh, m_samples);
            ++m_vertexQueries;
        }
        return *slot;
    }

    DistanceField field(const TetRef &tet, size_t interval) {
        const auto ids = m_grid.tet_vertex_ids(tet);
        DistanceField f;
        f.interval = static_cast<uint32_t>(interval);
        for (int k = 0; k < 4; ++k) f.d[k] = vertex_value(ids[k], interval);
        return f;
    }

    size_t vertex_queries() const { return m_vertexQueries; }

private:
    const TetGrid &m_grid;
    const MeshDistance &m_mesh;
    std::vector<RigidTransform> m_inverses;
    size_t m_intervals;
    int m_samples;
    detail::FlatMap<double> m_memo;
    size_t m_vertexQueries = 0;
};

/// Up to `count` distinct tets whose centroid is inside the model at the
/// interval start, found by rejection sampling inside the posed model's box.
/// Falls back to the tets holding the posed mesh vertices when no sample hits.
inline std::vector<TetRef> select_seeds(const TimeInterval &interval, const MeshDistance &mesh, const Trajectory &traj,
                                        const TetGrid &grid, size_t count, uint64_t rng_seed,
                                        size_t max_failures = 100000) {
    if (count == 0) throw ValidationError("fieldprop", "seed count must be >= 1");
    const RigidTransform pose = traj.evaluate(interval.t_start);
    const RigidTransform inv = pose.inverse();
    Aabb box;
    const Aabb &mb = mesh.mesh().bounds();
    for (int c = 0; c < 8; ++c)
        box.extend(pose.apply(Vec3(c & 1 ? mb.hi[0] : mb.lo[0], c & 2 ? mb.hi[1] : mb.lo[1], c & 4 ? mb.hi[2] : mb.lo[2])));
    const Aabb domain = grid.bounds();

    std::seed_seq seq{static_cast<uint32_t>(rng_seed), static_cast<uint32_t>(rng_seed >> 32),
                      static_cast<uint32_t>(interval.index)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<TetRef> seeds;
    std::set<uint64_t> taken;
    size_t failures = 0;
    while (seeds.size() < count && failures < max_failures) {
        Vec3 p;
        for (int a = 0; a < 3; ++a) p[a] = box.lo[a] + unit(rng) * (box.hi[a] - box.lo[a]);
        if (!domain.contains(p)) {
            ++failures;
            continue;
        }
        const TetRef t = grid.locate_tet(p);
        const uint64_t id = grid.tet_id(t);
        if (taken.count(id) || mesh.signed_distance(inv.apply(grid.tet_centroid(t))) >= 0) {
            ++failures;
            continue;
        }
        taken.insert(id);
        seeds.push_back(t);
        failures = 0;
    }
    if (!seeds.empty()) return seeds;

    for (const auto &v : mesh.mesh().vertices()) {
        const Vec3 p = pose.apply(v);
        if (!domain.contains(p)) continue;
        const TetRef t = grid.locate_tet(p);
        if (taken.insert(grid.tet_id(t)).second) seeds.push_back(t);
        if (seeds.size() == count) break;
    }
    if (seeds.empty()) throw Error("fieldprop", "model unresolvable at this grid resolution");
    return seeds;
}

struct PropagationOptions {
    int interior_samples = 10;
    size_t seeds_per_interval = 100;
    uint64_t rng_seed = 1;
    /// Let all-positive fields keep propagating (without being stored) while
    /// their smallest vertex value is below one cell diagonal.
    bool propagate_all_positive = false;
    /// Push neighbors in reverse slot order. Only used to check that the
    /// result does not depend on push order.
    bool reverse_neighbor_order = false;
};

struct PropagationStats {
    size_t seeds = 0;
    size_t events_popped = 0;
    size_t fields_evaluated = 0;
    size_t fields_stored = 0;
    size_t fields_evicted = 0;
    size_t vertex_queries = 0;
};

struct PropagationResult {
    std::vector<TetFieldSet> tets; // sorted by tet id, only tets with fields
    PropagationStats stats;
};

inline PropagationResult propagate(const TetGrid &grid, const MeshDistance &mesh, const Trajectory &traj,
                                   const std::vector<TimeInterval> &intervals, const PropagationOptions &opt = {}) {
    struct Event {
        double key;
        uint64_t tet;
        uint32_t interval;
        // Total order on (key, tet, interval): pop order depends only on the
        // set of pending events, never on push order.
        bool operator>(const Event &o) const {
            if (key != o.key) return key > o.key;
            if (tet != o.tet) return tet > o.tet;
            return interval > o.interval;
        }
    };
    struct Record {
        std::vector<DistanceField> fields;
        std::vector<uint32_t> visited;
    };

    PropagationResult result;
    FieldEvaluator eval(grid, mesh, traj, intervals, opt.interior_samples);
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
    detail::FlatMap<uint32_t> index(1 << 16);
    std::vector<Record> records;
    const double band = std::sqrt(3.0) * grid.cell_size();

    for (const auto &iv : intervals)
        for (const TetRef &s : select_seeds(iv, mesh, traj, grid, opt.seeds_per_interval, opt.rng_seed)) {
            queue.push({eval.field(s, iv.index).min(), grid.tet_id(s), static_cast<uint32_t>(iv.index)});
            ++result.stats.seeds;
        }

    auto push_neighbors = [&](const TetRef &tet, uint32_t interval, double key) {
        auto slots = grid.face_neighbor_slots(tet);
        if (opt.reverse_neighbor_order) std::reverse(slots.begin(), slots.end());
        for (const auto &n : slots)
            if (n) queue.push({key, grid.tet_id(*n), interval});
    };

    while (!queue.empty()) {
        const Event ev = queue.top();
        queue.pop();
        ++result.stats.events_popped;

        auto [slot, fresh] = index.try_emplace(ev.tet);
        if (fresh) {
            *slot = static_cast<uint32_t>(records.size());
            records.emplace_back();
        }
        const uint32_t rec_index = *slot;
        {
            auto &visited = records[rec_index].visited;
            if (std::find(visited.begin(), visited.end(), ev.interval) != visited.end()) continue;
            visited.push_back(ev.interval);
        }

        const TetRef tet = grid.tet_ref(ev.tet);
        const DistanceField f = eval.field(tet, ev.interval);
        ++result.stats.fields_evaluated;

        if (f.all_positive()) {
            if (opt.propagate_all_positive && f.min() < band) push_neighbors(tet, ev.interval, f.min());
            continue;
        }
        auto &stored = records[rec_index].fields;
        if (std::any_of(stored.begin(), stored.end(), [&](const DistanceField &g) { return supersedes(g, f); }))
            continue;
        const size_t before = stored.size();
        stored.erase(std::remove_if(stored.begin(), stored.end(), [&](const DistanceField &g) { return supersedes(f, g); }),
                     stored.end());
        result.stats.fields_evicted += before - stored.size();
        stored.push_back(f);
        push_neighbors(tet, ev.interval, f.min());
    }

    std::vector<std::pair<uint64_t, uint32_t>> order;
    index.for_each([&](uint64_t id, uint32_t r) {
        if (!records[r].fields.empty()) order.emplace_back(id, r);
    });
    std::sort(order.begin(), order.end());
    result.tets.reserve(order.size());
    for (const auto &[id, r] : order) {
        TetFieldSet set{grid.tet_ref(id), std::move(records[r].fields)};
        std::sort(set.fields.begin(), set.fields.end(),
                  [](const DistanceField &a, const DistanceField &b) { return a.interval < b.interval; });
        result.stats.fields_stored += set.fields.size();
        result.tets.push_back(std::move(set));
    }
    result.stats.vertex_queries = eval.vertex_queries();
    return result;
}

} // namespace swept
