#pragma once
// Zero-isosurface of the lower envelope min_i pi_i inside one tet.
//
// Every pi_i is linear on the tet, so the region {x : min_i pi_i(x) >= 0} is
// the tet intersected with one half-space per field. Two independent routes
// compute its field-tagged boundary:
//   * ConvexCell: clip the tet by each half-space pi_i >= 0 (3D polytope);
//   * Prism4: cut the prism tet x [-W, W] by w <= pi_i(x) in (x, w) space and
//     slice the lower envelope at w = 0.
// They must agree; the pipeline uses the 3D route.

#include "swept/fieldprop.hpp"

#include <unordered_map>

namespace swept {

inline double interpolate_field(const DistanceField &f, const std::array<Vec3, 4> &tet, const Vec3 &x) {
    const Vec4 b = barycentric(tet, x);
    return b[0] * f.d[0] + b[1] * f.d[1] + b[2] * f.d[2] + b[3] * f.d[3];
}

/// min over fields of the interpolated value; +inf for an empty list.
inline double envelope_value(const std::vector<DistanceField> &fields, const std::array<Vec3, 4> &tet, const Vec3 &x) {
    const Vec4 b = barycentric(tet, x);
    double best = std::numeric_limits<double>::infinity();
    for (const auto &f : fields) best = std::min(best, b[0] * f.d[0] + b[1] * f.d[1] + b[2] * f.d[2] + b[3] * f.d[3]);
    return best;
}

/// World-space gradient of the linear field taking values d at the tet corners.
inline Vec3 field_gradient(const std::array<Vec3, 4> &tet, const std::array<double, 4> &d) {
    Eigen::Matrix3d m;
    m.row(0) = (tet[1] - tet[0]).transpose();
    m.row(1) = (tet[2] - tet[0]).transpose();
    m.row(2) = (tet[3] - tet[0]).transpose();
    return m.partialPivLu().solve(Vec3(d[1] - d[0], d[2] - d[0], d[3] - d[0]));
}

/// Planar convex polygon on one field's zero set, counter-clockwise around the
/// field gradient (i.e. facing out of the swept volume).
struct Patch {
    uint32_t interval = 0;
    std::vector<Vec3> polygon;
};

struct TetSurface {
    TetRef tet;
    std::vector<Patch> patches;
};

namespace detail {

// Orders coplanar points counter-clockwise around `normal`.
inline std::vector<int> order_around(const std::vector<Vec3> &pts, const std::vector<int> &ids, const Vec3 &normal) {
    Vec3 c = Vec3::Zero();
    for (int i : ids) c += pts[i];
    c /= static_cast<double>(ids.size());
    const Vec3 n = normal.normalized();
    const Vec3 u = n.unitOrthogonal();
    const Vec3 v = n.cross(u);
    std::vector<std::pair<double, int>> keyed;
    keyed.reserve(ids.size());
    for (int i : ids) {
        const Vec3 r = pts[i] - c;
        keyed.emplace_back(std::atan2(r.dot(v), r.dot(u)), i);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> out;
    out.reserve(ids.size());
    for (const auto &k : keyed) out.push_back(k.second);
    return out;
}

inline bool lex_less(const Vec3 &a, const Vec3 &b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}

inline double polygon_area(const std::vector<Vec3> &poly) {
    Vec3 n = Vec3::Zero();
    for (size_t i = 1; i + 1 < poly.size(); ++i) n += (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    return 0.5 * n.norm();
}

} // namespace detail

/// Convex polytope inside a tet, each vertex carrying its barycentric
/// coordinates, each face tagged with its origin.
class ConvexCell {
public:
    struct Vertex {
        Vec3 pos;
        Vec4 bary;
    };
    struct Face {
        std::vector<int> loop; // outward-facing (counter-clockwise seen from outside)
        int tag;               // >= 0: field index; -1-k: tet face opposite vertex k
    };

    static ConvexCell from_tet(const std::array<Vec3, 4> &tet) {
        ConvexCell c;
        for (int k = 0; k < 4; ++k) c.m_vertices.push_back({tet[k], Vec4::Unit(k)});
        for (int k = 0; k < 4; ++k) {
            std::vector<int> loop;
            for (int j = 0; j < 4; ++j)
                if (j != k) loop.push_back(j);
            const Vec3 n = (tet[loop[1]] - tet[loop[0]]).cross(tet[loop[2]] - tet[loop[0]]);
            if (n.dot(tet[k] - tet[loop[0]]) > 0) std::swap(loop[1], loop[2]);
            c.m_faces.push_back({loop, -1 - k});
        }
        return c;
    }

    bool empty() const { return m_faces.empty(); }
    const std::vector<Vertex> &vertices() const { return m_vertices; }
    const std::vector<Face> &faces() const { return m_faces; }

    /// Keeps {x : bary(x) . d >= 0}. Vertices within eps of the plane are kept.
    /// `outward` is the outward normal of the new face (minus the field gradient).
    void clip(const std::array<double, 4> &d, int tag, const Vec3 &outward, double eps) {
        if (empty()) return;
        const size_t nv = m_vertices.size();
        std::vector<double> s(nv);
        std::vector<int> sign(nv);
        bool anyNeg = false, anyPos = false;
        int zeros = 0;
        for (size_t i = 0; i < nv; ++i) {
            const Vec4 &b = m_vertices[i].bary;
            s[i] = b[0] * d[0] + b[1] * d[1] + b[2] * d[2] + b[3] * d[3];
            sign[i] = s[i] > eps ? 1 : (s[i] < -eps ? -1 : 0);
            anyNeg |= sign[i] < 0;
            anyPos |= sign[i] > 0;
            zeros += sign[i] == 0;
        }
        if (!anyNeg) return;
        // With no positive vertex, a face lying on the plane survives as a flat
        // cell; its neighbor across that face sees no negative value and emits
        // nothing, so the surface would otherwise be lost.
        if (!anyPos && zeros < 3) {
            m_vertices.clear();
            m_faces.clear();
            return;
        }

        std::vector<int> remap(nv, -1);
        std::vector<Vertex> verts;
        for (size_t i = 0; i < nv; ++i)
            if (sign[i] >= 0) {
                remap[i] = static_cast<int>(verts.size());
                verts.push_back(m_vertices[i]);
            }
        std::vector<int> cap;
        for (size_t i = 0; i < nv; ++i)
            if (sign[i] == 0) cap.push_back(remap[i]);

        std::unordered_map<uint64_t, int> cut;
        auto crossing = [&](int a, int b) {
            const uint64_t key = (uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b));
            if (auto it = cut.find(key); it != cut.end()) return it->second;
            // Canonical endpoint order so a shared edge yields bit-identical points.
            if (detail::lex_less(m_vertices[b].pos, m_vertices[a].pos)) std::swap(a, b);
            const double t = s[a] / (s[a] - s[b]);
            const Vertex &va = m_vertices[a], &vb = m_vertices[b];
            verts.push_back({va.pos + t * (vb.pos - va.pos), va.bary + t * (vb.bary - va.bary)});
            const int id = static_cast<int>(verts.size() - 1);
            cap.push_back(id);
            return cut[key] = id;
        };

        std::vector<Face> faces;
        for (const auto &f : m_faces) {
            std::vector<int> loop;
            const size_t n = f.loop.size();
            for (size_t k = 0; k < n; ++k) {
                const int a = f.loop[k], b = f.loop[(k + 1) % n];
                if (sign[a] >= 0) loop.push_back(remap[a]);
                if (sign[a] * sign[b] < 0) loop.push_back(crossing(a, b));
            }
            if (loop.size() >= 3) faces.push_back({std::move(loop), f.tag});
        }
        if (cap.size() >= 3) {
            std::vector<Vec3> pos(verts.size());
            for (size_t i = 0; i < verts.size(); ++i) pos[i] = verts[i].pos;
            faces.push_back({detail::order_around(pos, cap, outward), tag});
        }
        m_vertices = std::move(verts);
        m_faces = std::move(faces);
    }

private:
    std::vector<Vertex> m_vertices;
    std::vector<Face> m_faces;
};

/// The tet prism in (x, w) space, cut by w <= pi_i(x). Vertices carry the
/// sorted ids of the facets they lie on; edges are recovered combinatorially.
class Prism4 {
public:
    // Facet ids: 0..3 tet faces (bary_k = 0), 4 bottom cap, 5 top cap, 6 + i field i.
    static constexpr int kBottom = 4, kTop = 5, kFieldBase = 6;

    struct Vertex {
        Vec4 bary;
        double w;
        std::vector<int> facets;
    };

    Prism4(double half_height) {
        for (int cap : {kBottom, kTop})
            for (int k = 0; k < 4; ++k) {
                Vertex v{Vec4::Unit(k), cap == kBottom ? -half_height : half_height, {}};
                for (int j = 0; j < 4; ++j)
                    if (j != k) v.facets.push_back(j);
                v.facets.push_back(cap);
                m_vertices.push_back(std::move(v));
            }
        m_normals[0] = Vec4(-1, -1, -1, 0);
        m_normals[1] = Vec4(1, 0, 0, 0);
        m_normals[2] = Vec4(0, 1, 0, 0);
        m_normals[3] = Vec4(0, 0, 1, 0);
        m_normals[kBottom] = Vec4(0, 0, 0, 1);
        m_normals[kTop] = Vec4(0, 0, 0, -1);
    }

    bool empty() const { return m_vertices.empty(); }
    const std::vector<Vertex> &vertices() const { return m_vertices; }

    /// Keeps w <= bary . d, tagging the new facet as field `field`.
    void cut(const std::array<double, 4> &d, int field, double eps) {
        if (empty()) return;
        const int facet = kFieldBase + field;
        m_normals[facet] = Vec4(d[1] - d[0], d[2] - d[0], d[3] - d[0], -1);
        const size_t nv = m_vertices.size();
        std::vector<double> s(nv);
        std::vector<int> sign(nv);
        bool anyNeg = false, anyPos = false;
        for (size_t i = 0; i < nv; ++i) {
            s[i] = m_vertices[i].bary.dot(Vec4(d[0], d[1], d[2], d[3])) - m_vertices[i].w;
            sign[i] = s[i] > eps ? 1 : (s[i] < -eps ? -1 : 0);
            anyNeg |= sign[i] < 0;
            anyPos |= sign[i] > 0;
        }
        if (!anyNeg) return;
        if (!anyPos) {
            m_vertices.clear();
            return;
        }
        std::vector<Vertex> next;
        for (size_t i = 0; i < nv; ++i) {
            if (sign[i] < 0) continue;
            Vertex v = m_vertices[i];
            if (sign[i] == 0) insert_sorted(v.facets, facet);
            next.push_back(std::move(v));
        }
        for (size_t a = 0; a < nv; ++a)
            for (size_t b = 0; b < nv; ++b) {
                if (sign[a] >= 0 || sign[b] <= 0 || !adjacent(a, b)) continue;
                const double t = s[a] / (s[a] - s[b]);
                const Vertex &va = m_vertices[a], &vb = m_vertices[b];
                Vertex v{va.bary + t * (vb.bary - va.bary), va.w + t * (vb.w - va.w), common(va, vb)};
                insert_sorted(v.facets, facet);
                next.push_back(std::move(v));
            }
        m_vertices = std::move(next);
    }

    struct SlicePoint {
        Vec4 bary;
        std::vector<int> facets;
    };

    /// Intersection with w = 0: vertices on it plus crossings of edges through it.
    std::vector<SlicePoint> slice(double eps) const {
        std::vector<SlicePoint> out;
        const size_t nv = m_vertices.size();
        for (size_t i = 0; i < nv; ++i)
            if (std::abs(m_vertices[i].w) <= eps) out.push_back({m_vertices[i].bary, m_vertices[i].facets});
        for (size_t a = 0; a < nv; ++a)
            for (size_t b = 0; b < nv; ++b) {
                const double wa = m_vertices[a].w, wb = m_vertices[b].w;
                if (!(wa < -eps && wb > eps) || !adjacent(a, b)) continue;
                const double t = wa / (wa - wb);
                out.push_back({m_vertices[a].bary + t * (m_vertices[b].bary - m_vertices[a].bary),
                               common(m_vertices[a], m_vertices[b])});
            }
        return out;
    }

private:
    static void insert_sorted(std::vector<int> &v, int x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x) v.insert(it, x);
    }

    static std::vector<int> common(const Vertex &a, const Vertex &b) {
        std::vector<int> c;
        std::set_intersection(a.facets.begin(), a.facets.end(), b.facets.begin(), b.facets.end(), std::back_inserter(c));
        return c;
    }

    int rank(const std::vector<int> &facets) const {
        Eigen::MatrixXd m(facets.size(), 4);
        for (size_t r = 0; r < facets.size(); ++r) m.row(r) = m_normals.at(facets[r]).transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        lu.setThreshold(1e-10);
        return static_cast<int>(lu.rank());
    }

    // Two vertices span an edge iff their shared facets have rank 3 and no
    // third vertex lies on all of them.
    bool adjacent(size_t a, size_t b) const {
        const std::vector<int> c = common(m_vertices[a], m_vertices[b]);
        if (c.size() < 3 || rank(c) < 3) return false;
        for (size_t x = 0; x < m_vertices.size(); ++x) {
            if (x == a || x == b) continue;
            const auto &f = m_vertices[x].facets;
            if (std::includes(f.begin(), f.end(), c.begin(), c.end())) return false;
        }
        return true;
    }

    std::vector<Vertex> m_vertices;
    std::unordered_map<int, Vec4> m_normals;
};

enum class ExtractionRoute { Clip3D, Cut4D };

/// Zero-surface patches of min over `fields` inside the tet. Empty when every
/// field is positive throughout or the tet lies entirely inside.
inline std::vector<Patch> extract_tet_surface(const std::array<Vec3, 4> &tet, const std::vector<DistanceField> &fields,
                                              ExtractionRoute route = ExtractionRoute::Clip3D) {
    std::vector<Patch> out;
    if (fields.empty()) return out;
    const double h = std::max({(tet[1] - tet[0]).norm(), (tet[2] - tet[0]).norm(), (tet[3] - tet[0]).norm()});
    const double eps = 1e-10 * h;

    if (route == ExtractionRoute::Clip3D) {
        ConvexCell cell = ConvexCell::from_tet(tet);
        for (size_t i = 0; i < fields.size(); ++i) {
            cell.clip(fields[i].d, static_cast<int>(i), -field_gradient(tet, fields[i].d), eps);
            if (cell.empty()) return out;
        }
        for (const auto &f : cell.faces()) {
            if (f.tag < 0) continue;
            Patch p{fields[f.tag].interval, {}};
            for (auto it = f.loop.rbegin(); it != f.loop.rend(); ++it) p.polygon.push_back(cell.vertices()[*it].pos);
            out.push_back(std::move(p));
        }
        std::sort(out.begin(), out.end(), [](const Patch &a, const Patch &b) { return a.interval < b.interval; });
        return out;
    }

    double dmax = 0;
    for (const auto &f : fields)
        for (double v : f.d) dmax = std::max(dmax, std::abs(v));
    Prism4 prism(dmax + 1.0);
    for (size_t i = 0; i < fields.size(); ++i) {
        prism.cut(fields[i].d, static_cast<int>(i), eps);
        if (prism.empty()) return out;
    }
    const auto slice = prism.slice(eps);
    std::vector<Vec3> pos;
    for (const auto &sp : slice) pos.push_back(sp.bary[0] * tet[0] + sp.bary[1] * tet[1] + sp.bary[2] * tet[2] + sp.bary[3] * tet[3]);
    for (size_t i = 0; i < fields.size(); ++i) {
        const int facet = Prism4::kFieldBase + static_cast<int>(i);
        std::vector<int> ids;
        for (size_t k = 0; k < slice.size(); ++k) {
            if (!std::binary_search(slice[k].facets.begin(), slice[k].facets.end(), facet)) continue;
            const bool dup = std::any_of(ids.begin(), ids.end(), [&](int j) { return (pos[j] - pos[k]).norm() <= eps; });
            if (!dup) ids.push_back(static_cast<int>(k));
        }
        if (ids.size() < 3) continue;
        Patch p{fields[i].interval, {}};
        for (int k : detail::order_around(pos, ids, field_gradient(tet, fields[i].d))) p.polygon.push_back(pos[k]);
        if (detail::polygon_area(p.polygon) <= eps * eps) continue;
        out.push_back(std::move(p));
    }
    return out;
}

/// Classic marching tetrahedra on one scalar per vertex (inside: value < 0).
/// Triangles face out of the negative region.
inline std::vector<std::array<Vec3, 3>> marching_tet(const std::array<Vec3, 4> &tet, const std::array<double, 4> &d) {
    std::vector<std::array<Vec3, 3>> tris;
    std::vector<int> in, out;
    for (int k = 0; k < 4; ++k) (d[k] < 0 ? in : out).push_back(k);
    if (in.empty() || out.empty()) return tris;
    auto edge_point = [&](int a, int b) {
        if (detail::lex_less(tet[b], tet[a])) std::swap(a, b);
        const double t = d[a] / (d[a] - d[b]);
        return Vec3(tet[a] + t * (tet[b] - tet[a]));
    };
    const Vec3 grad = field_gradient(tet, d);
    auto emit = [&](Vec3 a, Vec3 b, Vec3 c) {
        if ((b - a).cross(c - a).dot(grad) < 0) std::swap(b, c);
        tris.push_back({a, b, c});
    };
    if (in.size() == 1 || out.size() == 1) {
        const bool lone_in = in.size() == 1;
        const int apex = lone_in ? in[0] : out[0];
        const auto &others = lone_in ? out : in;
        emit(edge_point(apex, others[0]), edge_point(apex, others[1]), edge_point(apex, others[2]));
    } else {
        // Quad on edges in0-out0, in0-out1, in1-out1, in1-out0 (cyclic order).
        const Vec3 p0 = edge_point(in[0], out[0]), p1 = edge_point(in[0], out[1]);
        const Vec3 p2 = edge_point(in[1], out[1]), p3 = edge_point(in[1], out[0]);
        emit(p0, p1, p2);
        emit(p0, p2, p3);
    }
    return tris;
}

// ---------------------------------------------------------------------------
// Assembly

namespace detail {

/// Merges vertices closer than `tol`, in input order.
class VertexWelder {
public:
    explicit VertexWelder(double tol) : m_tol(tol) {}

    int add(const Vec3 &p, std::vector<Vec3> &verts) {
        const std::array<int64_t, 3> c = cell(p);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = m_buckets.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == m_buckets.end()) continue;
                    for (int id : it->second)
                        if ((verts[id] - p).norm() <= m_tol) return id;
                }
        verts.push_back(p);
        const int id = static_cast<int>(verts.size() - 1);
        m_buckets[key(c)].push_back(id);
        return id;
    }

private:
    std::array<int64_t, 3> cell(const Vec3 &p) const {
        return {static_cast<int64_t>(std::floor(p[0] / m_tol)), static_cast<int64_t>(std::floor(p[1] / m_tol)),
                static_cast<int64_t>(std::floor(p[2] / m_tol))};
    }
    static uint64_t key(const std::array<int64_t, 3> &c) {
        uint64_t h = 1469598103934665603ULL;
        for (int64_t v : c) h = (h ^ static_cast<uint64_t>(v)) * 1099511628211ULL;
        return h;
    }

    double m_tol;
    std::unordered_map<uint64_t, std::vector<int>> m_buckets;
};

} // namespace detail

/// Fan-triangulates every patch, welds vertices within 1e-6 cell sizes and
/// drops triangles with area below 1e-12 cell sizes squared.
inline SurfaceMesh assemble_triangles(const std::vector<std::array<Vec3, 3>> &soup, double cell_size) {
    SurfaceMesh m;
    detail::VertexWelder weld(1e-6 * cell_size);
    const double minArea = 1e-12 * cell_size * cell_size;
    for (const auto &t : soup) {
        if (triangle_area(t[0], t[1], t[2]) < minArea) continue;
        const Tri tri{weld.add(t[0], m.vertices), weld.add(t[1], m.vertices), weld.add(t[2], m.vertices)};
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0]) continue;
        m.triangles.push_back(tri);
    }
    return m;
}

inline void triangulate_patches(const std::vector<Patch> &patches, std::vector<std::array<Vec3, 3>> &soup) {
    for (const auto &p : patches)
        for (size_t k = 1; k + 1 < p.polygon.size(); ++k) soup.push_back({p.polygon[0], p.polygon[k], p.polygon[k + 1]});
}

inline SurfaceMesh assemble_surface(const std::vector<TetSurface> &surfaces, double cell_size) {
    std::vector<std::array<Vec3, 3>> soup;
    for (const auto &s : surfaces) triangulate_patches(s.patches, soup);
    return assemble_triangles(soup, cell_size);
}

/// Undirected edges with exactly one incident triangle.
inline size_t open_edge_count(const SurfaceMesh &m) {
    std::unordered_map<uint64_t, int> count;
    for (const auto &t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const auto a = static_cast<uint64_t>(std::min(t[e], t[(e + 1) % 3]));
            const auto b = static_cast<uint64_t>(std::max(t[e], t[(e + 1) % 3]));
            ++count[(a << 32) | b];
        }
    return static_cast<size_t>(std::count_if(count.begin(), count.end(), [](const auto &kv) { return kv.second == 1; }));
}

} // namespace swept
