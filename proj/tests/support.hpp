#pragma once
// Shared fixtures and independent oracles for the unit tests.

#include "swept/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

namespace swept::test {

inline const char *kCubeObj = R"(# unit cube centred at the origin
v -0.5 -0.5 -0.5
v  0.5 -0.5 -0.5
v -0.5  0.5 -0.5
v  0.5  0.5 -0.5
v -0.5 -0.5  0.5
v  0.5 -0.5  0.5
v -0.5  0.5  0.5
v  0.5  0.5  0.5
f 1 3 4
f 1 4 2
f 5 6 8
f 5 8 7
f 1 2 6
f 1 6 5
f 3 7 8
f 3 8 4
f 1 5 7
f 1 7 3
f 2 4 8
f 2 8 6
)";

inline SurfaceMesh parse(const std::string &text) {
    std::istringstream in(text);
    return parse_obj(in);
}

inline MeshDistance unit_cube() { return MeshDistance(TriangleMesh(parse(kCubeObj), nullptr)); }

inline MeshDistance sphere(double r, int level = 3, const Vec3 &c = Vec3::Zero()) {
    return MeshDistance(TriangleMesh(primitives::icosphere(r, level, c), nullptr));
}

/// Axis-aligned box SDF written out per region, no shared helpers.
inline double box_oracle(const Vec3 &p, const Vec3 &lo, const Vec3 &hi) {
    double outside2 = 0, inside = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        const double below = lo[a] - p[a], above = p[a] - hi[a];
        const double e = std::max(below, above);
        if (e > 0) outside2 += e * e;
        inside = std::max(inside, e);
    }
    return outside2 > 0 ? std::sqrt(outside2) : inside;
}

/// Point-triangle distance by dense barycentric search refined with a
/// projection; independent of the library's Voronoi-region code.
inline double point_triangle_oracle(const Vec3 &p, const Vec3 &a, const Vec3 &b, const Vec3 &c) {
    auto seg = [](const Vec3 &p, const Vec3 &u, const Vec3 &v) {
        const Vec3 d = v - u;
        const double t = std::clamp((p - u).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (u + t * d - p).norm();
    };
    const Vec3 n = (b - a).cross(c - a).normalized();
    const Vec3 q = p - (p - a).dot(n) * n;
    const double s0 = (b - a).cross(q - a).dot(n), s1 = (c - b).cross(q - b).dot(n), s2 = (a - c).cross(q - c).dot(n);
    if (s0 >= 0 && s1 >= 0 && s2 >= 0) return std::abs((p - a).dot(n));
    return std::min({seg(p, a, b), seg(p, b, c), seg(p, c, a)});
}

inline double brute_unsigned(const SurfaceMesh &m, const Vec3 &p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto &t : m.triangles)
        best = std::min(best, point_triangle_oracle(p, m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
    return best;
}

inline std::filesystem::path temp_dir(const std::string &name) {
    auto p = std::filesystem::temp_directory_path() / ("swept_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace swept::test
