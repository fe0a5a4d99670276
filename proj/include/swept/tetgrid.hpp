#pragma once
// Uniform cube lattice, five tetrahedra per cube. Cubes with odd coordinate
// parity use the mirrored split so that shared cube faces carry the same
// diagonal from both sides. Tets are implicit: everything is computed from
// (cube, local index).

#include "swept/motion.hpp"

namespace swept {

struct TetRef {
    std::array<int, 3> cube{0, 0, 0};
    int local = 0;

    friend bool operator==(const TetRef &, const TetRef &) = default;
};

namespace detail {

// Corner c of a unit cube sits at (c & 1, (c >> 1) & 1, (c >> 2) & 1).
// Index 4 is the central tet; 0..3 are the corner tets.
inline constexpr int kTetCorners[2][5][4] = {
    {{1, 0, 3, 5}, {2, 0, 3, 6}, {4, 0, 5, 6}, {7, 3, 5, 6}, {0, 3, 5, 6}},
    {{0, 1, 2, 4}, {3, 1, 2, 7}, {5, 1, 4, 7}, {6, 2, 4, 7}, {1, 2, 4, 7}},
};

inline std::array<int, 3> corner_offset(int c) { return {c & 1, (c >> 1) & 1, (c >> 2) & 1}; }

struct FaceLink {
    bool exists = false;
    std::array<int, 3> cube_delta{0, 0, 0};
    int local = 0;
};

// neighbor_table()[parity][local][face]: face f is opposite tet vertex f.
inline const std::array<std::array<std::array<FaceLink, 4>, 5>, 2> &neighbor_table() {
    static const auto table = [] {
        std::array<std::array<std::array<FaceLink, 4>, 5>, 2> t{};
        auto face_key = [](int parity, const std::array<int, 3> &delta, int local, int face) {
            std::array<std::array<int, 3>, 3> pts;
            int n = 0;
            for (int v = 0; v < 4; ++v) {
                if (v == face) continue;
                const auto o = corner_offset(kTetCorners[parity][local][v]);
                pts[n++] = {o[0] + delta[0], o[1] + delta[1], o[2] + delta[2]};
            }
            std::sort(pts.begin(), pts.end());
            return pts;
        };
        const std::array<std::array<int, 3>, 7> deltas{{{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
        for (int p = 0; p < 2; ++p)
            for (int l = 0; l < 5; ++l)
                for (int f = 0; f < 4; ++f) {
                    const auto key = face_key(p, {0, 0, 0}, l, f);
                    for (const auto &d : deltas) {
                        const bool same = d == std::array<int, 3>{0, 0, 0};
                        const int q = same ? p : 1 - p;
                        for (int l2 = 0; l2 < 5; ++l2) {
                            if (same && l2 == l) continue;
                            for (int f2 = 0; f2 < 4; ++f2)
                                if (face_key(q, d, l2, f2) == key) t[p][l][f] = {true, d, l2};
                        }
                    }
                }
        return t;
    }();
    return table;
}

} // namespace detail

class TetGrid {
public:
    TetGrid(const Vec3 &origin, double cell_size, const std::array<int, 3> &dims)
        : m_origin(origin), m_h(cell_size), m_dims(dims) {
        if (!(cell_size > 0)) throw ValidationError("grid", "cell size must be positive");
        for (int d : dims)
            if (d < 1) throw ValidationError("grid", "grid dimensions must be positive");
    }

    const Vec3 &origin() const { return m_origin; }
    double cell_size() const { return m_h; }
    const std::array<int, 3> &dims() const { return m_dims; }
    size_t num_cubes() const { return size_t(m_dims[0]) * m_dims[1] * m_dims[2]; }
    size_t num_tets() const { return 5 * num_cubes(); }
    size_t num_lattice_vertices() const { return size_t(m_dims[0] + 1) * (m_dims[1] + 1) * (m_dims[2] + 1); }
    Aabb bounds() const {
        return {m_origin, m_origin + m_h * Vec3(m_dims[0], m_dims[1], m_dims[2])};
    }

    static int parity(const std::array<int, 3> &c) { return (c[0] + c[1] + c[2]) & 1; }

    bool valid(const TetRef &r) const {
        return r.local >= 0 && r.local < 5 && r.cube[0] >= 0 && r.cube[1] >= 0 && r.cube[2] >= 0 &&
               r.cube[0] < m_dims[0] && r.cube[1] < m_dims[1] && r.cube[2] < m_dims[2];
    }

    uint64_t tet_id(const TetRef &r) const {
        return 5 * (uint64_t(r.cube[0]) + uint64_t(m_dims[0]) * (uint64_t(r.cube[1]) + uint64_t(m_dims[1]) * uint64_t(r.cube[2]))) +
               uint64_t(r.local);
    }
    TetRef tet_ref(uint64_t id) const {
        TetRef r;
        r.local = int(id % 5);
        uint64_t c = id / 5;
        r.cube[0] = int(c % m_dims[0]);
        c /= m_dims[0];
        r.cube[1] = int(c % m_dims[1]);
        r.cube[2] = int(c / m_dims[1]);
        return r;
    }

    uint64_t vertex_id(int i, int j, int k) const {
        return uint64_t(i) + uint64_t(m_dims[0] + 1) * (uint64_t(j) + uint64_t(m_dims[1] + 1) * uint64_t(k));
    }
    std::array<int, 3> vertex_coords(uint64_t id) const {
        const uint64_t nx = m_dims[0] + 1, ny = m_dims[1] + 1;
        return {int(id % nx), int((id / nx) % ny), int(id / (nx * ny))};
    }
    Vec3 vertex_position(int i, int j, int k) const {
        return {m_origin[0] + m_h * i, m_origin[1] + m_h * j, m_origin[2] + m_h * k};
    }
    Vec3 vertex_position(uint64_t id) const {
        const auto c = vertex_coords(id);
        return vertex_position(c[0], c[1], c[2]);
    }

    /// Lattice ids of the tet's corners, in tet vertex order.
    std::array<uint64_t, 4> tet_vertex_ids(const TetRef &r) const {
        check(r);
        const auto &corners = detail::kTetCorners[parity(r.cube)][r.local];
        std::array<uint64_t, 4> out;
        for (int v = 0; v < 4; ++v) {
            const auto o = detail::corner_offset(corners[v]);
            out[v] = vertex_id(r.cube[0] + o[0], r.cube[1] + o[1], r.cube[2] + o[2]);
        }
        return out;
    }

    std::array<Vec3, 4> tet_vertices(const TetRef &r) const {
        check(r);
        const auto &corners = detail::kTetCorners[parity(r.cube)][r.local];
        std::array<Vec3, 4> out;
        for (int v = 0; v < 4; ++v) {
            const auto o = detail::corner_offset(corners[v]);
            out[v] = vertex_position(r.cube[0] + o[0], r.cube[1] + o[1], r.cube[2] + o[2]);
        }
        return out;
    }

    Vec3 tet_centroid(const TetRef &r) const {
        const auto v = tet_vertices(r);
        return 0.25 * (v[0] + v[1] + v[2] + v[3]);
    }

    /// Tets sharing a full face with r; entry k (if present) is across the face
    /// opposite vertex k. Faces on the domain boundary have no neighbor.
    std::array<std::optional<TetRef>, 4> face_neighbor_slots(const TetRef &r) const {
        check(r);
        std::array<std::optional<TetRef>, 4> out;
        const auto &links = detail::neighbor_table()[parity(r.cube)][r.local];
        for (int f = 0; f < 4; ++f) {
            const auto &l = links[f];
            TetRef n{{r.cube[0] + l.cube_delta[0], r.cube[1] + l.cube_delta[1], r.cube[2] + l.cube_delta[2]}, l.local};
            if (l.exists && valid(n)) out[f] = n;
        }
        return out;
    }

    std::vector<TetRef> face_neighbors(const TetRef &r) const {
        std::vector<TetRef> out;
        for (const auto &n : face_neighbor_slots(r))
            if (n) out.push_back(*n);
        return out;
    }

    /// Tet containing p. Ties on shared faces go to the lowest local index
    /// within the cube found by flooring p.
    TetRef locate_tet(const Vec3 &p) const {
        const double tol = 1e-12 * m_h;
        if (!bounds().contains(p, tol)) throw Error("grid", "point outside grid domain");
        TetRef r;
        Vec3 local;
        for (int a = 0; a < 3; ++a) {
            const double u = (p[a] - m_origin[a]) / m_h;
            r.cube[a] = std::clamp(static_cast<int>(std::floor(u)), 0, m_dims[a] - 1);
            local[a] = u - r.cube[a];
        }
        const int par = parity(r.cube);
        int best = 4;
        double bestMin = -std::numeric_limits<double>::infinity();
        for (int l = 0; l < 5; ++l) {
            std::array<Vec3, 4> unit;
            for (int v = 0; v < 4; ++v) {
                const auto o = detail::corner_offset(detail::kTetCorners[par][l][v]);
                unit[v] = Vec3(o[0], o[1], o[2]);
            }
            const double m = barycentric(unit, local).minCoeff();
            if (m >= -1e-12) {
                r.local = l;
                return r;
            }
            if (m > bestMin) {
                bestMin = m;
                best = l;
            }
        }
        r.local = best; // numerically outside every tet by a hair; take the closest
        return r;
    }

private:
    void check(const TetRef &r) const {
        if (!valid(r)) throw Error("grid", "tet reference out of range");
    }

    Vec3 m_origin;
    double m_h;
    std::array<int, 3> m_dims;
};

/// Cubic-cell grid with `resolution` cells along every axis, centered on
/// `domain`, cell size chosen so the longest side fits exactly.
inline TetGrid build_grid(const Aabb &domain, int resolution) {
    if (resolution < 2) throw ValidationError("grid", "grid resolution must be >= 2");
    if (domain.empty() || !(domain.extent().maxCoeff() > 0)) throw ValidationError("grid", "empty domain");
    const double h = domain.extent().maxCoeff() / resolution;
    const Vec3 origin = domain.center() - Vec3::Constant(0.5 * resolution * h);
    return TetGrid(origin, h, {resolution, resolution, resolution});
}

/// Grid over `domain` padded by `pad_cells` cells on every side.
inline TetGrid fit_grid(const Aabb &domain, int resolution, int pad_cells = 2) {
    if (resolution <= 2 * pad_cells) throw ValidationError("grid", "grid resolution too small for padding");
    if (domain.empty() || !(domain.extent().maxCoeff() > 0)) throw ValidationError("grid", "empty domain");
    const double h = domain.extent().maxCoeff() / (resolution - 2 * pad_cells);
    const Vec3 origin = domain.center() - Vec3::Constant(0.5 * resolution * h);
    return TetGrid(origin, h, {resolution, resolution, resolution});
}

/// Bounding box of the moving model, from the 8 corners of its rest-pose box
/// transformed at `samples` + 1 evenly spaced times.
inline Aabb swept_bounds(const Aabb &model, const Trajectory &traj, size_t samples) {
    Aabb out;
    samples = std::max<size_t>(samples, 1);
    for (size_t s = 0; s <= samples; ++s) {
        const RigidTransform f = traj.evaluate(static_cast<double>(s) / static_cast<double>(samples));
        for (int c = 0; c < 8; ++c) {
            const Vec3 p(c & 1 ? model.hi[0] : model.lo[0], c & 2 ? model.hi[1] : model.lo[1],
                         c & 4 ? model.hi[2] : model.lo[2]);
            out.extend(f.apply(p));
        }
    }
    return out;
}

} // namespace swept
