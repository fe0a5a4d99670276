#pragma once
// Triangle meshes: plain indexed storage, OBJ I/O, and the validated
// watertight mesh used for signed-distance queries.

#include "swept/geometry.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

namespace swept {

using Tri = std::array<int, 3>;

/// Indexed triangle storage with no topological guarantees. Used for
/// extraction output and as the input to TriangleMesh validation.
struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> triangles;

    Aabb bounds() const {
        Aabb b;
        for (const auto &v : vertices) b.extend(v);
        return b;
    }
    double area() const {
        double a = 0;
        for (const auto &t : triangles) a += triangle_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        return a;
    }
};

inline SurfaceMesh parse_obj(std::istream &in, const std::string &name = "<stream>") {
    SurfaceMesh m;
    std::string line;
    size_t lineno = 0;
    auto fail = [&](const std::string &msg) {
        throw ValidationError("mesh", name + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p[0] >> p[1] >> p[2])) fail("malformed vertex record");
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (ls >> tok) {
                // "f v", "f v/vt", "f v//vn", "f v/vt/vn"; only the position index matters.
                const auto slash = tok.find('/');
                long idx = 0;
                try {
                    idx = std::stol(tok.substr(0, slash));
                } catch (const std::exception &) {
                    fail("malformed face index '" + tok + "'");
                }
                if (idx < 0) idx = static_cast<long>(m.vertices.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<long>(m.vertices.size()))
                    fail("face index " + tok + " out of range");
                poly.push_back(static_cast<int>(idx - 1));
            }
            if (poly.size() < 3) fail("face with fewer than 3 vertices");
            for (size_t k = 1; k + 1 < poly.size(); ++k) m.triangles.push_back({poly[0], poly[k], poly[k + 1]});
        }
        // vn, vt, o, g, s, usemtl ... are ignored.
    }
    return m;
}

inline SurfaceMesh read_obj(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("mesh", "cannot open '" + path + "'");
    return parse_obj(in, path);
}

inline void write_obj(std::ostream &out, const SurfaceMesh &m) {
    char buf[96];
    for (const auto &v : m.vertices) {
        std::snprintf(buf, sizeof buf, "v %.12g %.12g %.12g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto &t : m.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void write_obj(const std::string &path, const SurfaceMesh &m) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot write '" + path + "'");
    write_obj(out, m);
}

/// Closest-point feature on a triangle, used to pick the pseudonormal.
enum class Feature : uint8_t { Vertex0, Vertex1, Vertex2, Edge01, Edge12, Edge20, Face };

struct TriangleHit {
    Vec3 point;
    Feature feature;
};

// Region-based closest point on triangle (Ericson, Real-Time Collision Detection 5.1.5).
inline TriangleHit closest_point_on_triangle(const Vec3 &p, const Vec3 &a, const Vec3 &b, const Vec3 &c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0) return {a, Feature::Vertex0};

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) return {b, Feature::Vertex1};

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        const double v = d1 / (d1 - d3);
        return {a + v * ab, Feature::Edge01};
    }

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) return {c, Feature::Vertex2};

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        const double w = d2 / (d2 - d6);
        return {a + w * ac, Feature::Edge20};
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return {b + w * (c - b), Feature::Edge12};
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom, w = vc * denom;
    return {a + ab * v + ac * w, Feature::Face};
}

/// Watertight, consistently oriented triangle mesh with angle-weighted
/// pseudonormals. Immutable after construction.
class TriangleMesh {
public:
    /// Validates `raw`: drops zero-area faces (logged to `log`), then requires
    /// every edge to be shared by exactly two oppositely wound triangles.
    /// Inward-facing meshes (negative volume) are flipped.
    explicit TriangleMesh(SurfaceMesh raw, std::ostream *log = &std::clog) : m_data(std::move(raw)) {
        if (m_data.triangles.empty()) throw ValidationError("mesh", "mesh has no triangles");
        const double scale = std::max(m_data.bounds().diagonal(), 1e-300);
        std::vector<Tri> kept;
        kept.reserve(m_data.triangles.size());
        size_t dropped = 0;
        for (const auto &t : m_data.triangles) {
            const auto &v = m_data.vertices;
            if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0] ||
                triangle_area(v[t[0]], v[t[1]], v[t[2]]) <= 1e-14 * scale * scale) {
                ++dropped;
                continue;
            }
            kept.push_back(t);
        }
        if (dropped && log) *log << "mesh: removed " << dropped << " degenerate triangle(s)\n";
        m_data.triangles = std::move(kept);
        check_manifold();

        double vol = 0;
        for (const auto &t : m_data.triangles)
            vol += tet_signed_volume(Vec3::Zero(), m_data.vertices[t[0]], m_data.vertices[t[1]], m_data.vertices[t[2]]);
        if (vol < 0) {
            for (auto &t : m_data.triangles) std::swap(t[1], t[2]);
            if (log) *log << "mesh: inward orientation detected, flipped all triangles\n";
        }
        m_bounds = m_data.bounds();
        compute_pseudonormals();
    }

    const SurfaceMesh &data() const { return m_data; }
    const std::vector<Vec3> &vertices() const { return m_data.vertices; }
    const std::vector<Tri> &triangles() const { return m_data.triangles; }
    size_t num_triangles() const { return m_data.triangles.size(); }
    const Aabb &bounds() const { return m_bounds; }

    const Vec3 &face_normal(size_t f) const { return m_faceNormals[f]; }

    /// Pseudonormal of the closest feature of triangle f.
    const Vec3 &pseudonormal(size_t f, Feature feat) const {
        const Tri &t = m_data.triangles[f];
        switch (feat) {
        case Feature::Vertex0: return m_vertexNormals[t[0]];
        case Feature::Vertex1: return m_vertexNormals[t[1]];
        case Feature::Vertex2: return m_vertexNormals[t[2]];
        case Feature::Edge01: return m_edgeNormals[f][0];
        case Feature::Edge12: return m_edgeNormals[f][1];
        case Feature::Edge20: return m_edgeNormals[f][2];
        case Feature::Face: break;
        }
        return m_faceNormals[f];
    }

private:
    static uint64_t edge_key(int a, int b) {
        const auto lo = static_cast<uint64_t>(std::min(a, b)), hi = static_cast<uint64_t>(std::max(a, b));
        return (lo << 32) | hi;
    }

    void check_manifold() {
        // Directed half-edge counts per undirected edge.
        struct Use {
            int forward = 0, backward = 0;
        };
        std::unordered_map<uint64_t, Use> uses;
        uses.reserve(m_data.triangles.size() * 2);
        for (const auto &t : m_data.triangles)
            for (int e = 0; e < 3; ++e) {
                const int a = t[e], b = t[(e + 1) % 3];
                auto &u = uses[edge_key(a, b)];
                (a < b ? u.forward : u.backward)++;
            }
        // Report the smallest offending edge so diagnostics are reproducible.
        std::map<uint64_t, Use> sorted(uses.begin(), uses.end());
        for (const auto &[key, u] : sorted) {
            const auto a = key >> 32, b = key & 0xffffffffu;
            const std::string edge = "edge (" + std::to_string(a) + ", " + std::to_string(b) + ")";
            const int n = u.forward + u.backward;
            if (n == 1) throw ValidationError("mesh", "open mesh: " + edge + " has a single incident triangle");
            if (n > 2)
                throw ValidationError("mesh", "non-manifold mesh: " + edge + " has " + std::to_string(n) +
                                                  " incident triangles");
            if (u.forward != 1)
                throw ValidationError("mesh", "inconsistent winding at " + edge);
        }
    }

    void compute_pseudonormals() {
        const auto &V = m_data.vertices;
        const auto &T = m_data.triangles;
        m_faceNormals.resize(T.size());
        m_vertexNormals.assign(V.size(), Vec3::Zero());
        for (size_t f = 0; f < T.size(); ++f) {
            const Vec3 &a = V[T[f][0]], &b = V[T[f][1]], &c = V[T[f][2]];
            m_faceNormals[f] = (b - a).cross(c - a).normalized();
            for (int k = 0; k < 3; ++k) {
                const Vec3 &p = V[T[f][k]];
                const Vec3 e1 = (V[T[f][(k + 1) % 3]] - p).normalized();
                const Vec3 e2 = (V[T[f][(k + 2) % 3]] - p).normalized();
                const double angle = std::acos(std::clamp(e1.dot(e2), -1.0, 1.0));
                m_vertexNormals[T[f][k]] += angle * m_faceNormals[f];
            }
        }
        for (auto &n : m_vertexNormals) n.normalize();

        std::unordered_map<uint64_t, Vec3> edgeSum;
        edgeSum.reserve(T.size() * 2);
        for (size_t f = 0; f < T.size(); ++f)
            for (int e = 0; e < 3; ++e) {
                auto [it, fresh] = edgeSum.try_emplace(edge_key(T[f][e], T[f][(e + 1) % 3]), m_faceNormals[f]);
                if (!fresh) it->second += m_faceNormals[f];
            }
        m_edgeNormals.resize(T.size());
        for (size_t f = 0; f < T.size(); ++f)
            for (int e = 0; e < 3; ++e)
                m_edgeNormals[f][e] = edgeSum.at(edge_key(T[f][e], T[f][(e + 1) % 3])).normalized();
    }

    SurfaceMesh m_data;
    Aabb m_bounds;
    std::vector<Vec3> m_faceNormals;
    std::vector<Vec3> m_vertexNormals;
    std::vector<std::array<Vec3, 3>> m_edgeNormals;
};

inline TriangleMesh load_mesh(const std::string &path, std::ostream *log = &std::clog) {
    return TriangleMesh(read_obj(path), log);
}

namespace primitives {

/// Axis-aligned box with outward winding (8 vertices, 12 triangles).
inline SurfaceMesh box(const Vec3 &lo, const Vec3 &hi) {
    SurfaceMesh m;
    for (int c = 0; c < 8; ++c)
        m.vertices.emplace_back(c & 1 ? hi[0] : lo[0], c & 2 ? hi[1] : lo[1], c & 4 ? hi[2] : lo[2]);
    m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
    return m;
}

/// Subdivided icosahedron projected to a sphere; 20 * 4^subdivisions triangles.
inline SurfaceMesh icosphere(double radius, int subdivisions, const Vec3 &center = Vec3::Zero()) {
    const double phi = std::numbers::phi;
    std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto &p : v) p.normalize();
    std::vector<Tri> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back((v[a] + v[b]).normalized());
            return mid[key] = static_cast<int>(v.size() - 1);
        };
        std::vector<Tri> next;
        next.reserve(f.size() * 4);
        for (const auto &t : f) {
            const int a = midpoint(t[0], t[1]), b = midpoint(t[1], t[2]), c = midpoint(t[2], t[0]);
            next.push_back({t[0], a, c});
            next.push_back({t[1], b, a});
            next.push_back({t[2], c, b});
            next.push_back({a, b, c});
        }
        f = std::move(next);
    }
    SurfaceMesh m;
    for (const auto &p : v) m.vertices.push_back(center + radius * p);
    m.triangles = std::move(f);
    return m;
}

} // namespace primitives
} // namespace swept
