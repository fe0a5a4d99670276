#pragma once
// Bounding-volume hierarchy over triangles: closest point, segment/triangle
// crossings and segment-to-surface distance.

#include "swept/mesh.hpp"

#include <numeric>
#include <optional>

namespace swept {

struct SegmentPoints {
    Vec3 on_first, on_second;
};

// Closest points between segments p0p1 and q0q1 (Ericson 5.1.9).
inline SegmentPoints closest_points_segments(const Vec3 &p0, const Vec3 &p1, const Vec3 &q0, const Vec3 &q1) {
    const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    constexpr double tiny = 1e-300;
    double s = 0, t = 0;
    if (a <= tiny && e <= tiny) return {p0, q0};
    if (a <= tiny) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= tiny) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2), denom = a * e - b * b;
            s = denom > 0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0) {
                t = 0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1) {
                t = 1;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return {p0 + d1 * s, q0 + d2 * t};
}

/// Parameter in [0,1] where segment p0->p1 crosses triangle abc, if it does.
inline std::optional<double> segment_triangle_crossing(const Vec3 &p0, const Vec3 &p1, const Vec3 &a, const Vec3 &b,
                                                      const Vec3 &c) {
    const Vec3 dir = p1 - p0;
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 h = dir.cross(e2);
    const double det = e1.dot(h);
    const double scale = e1.norm() * e2.norm() * dir.norm();
    if (std::abs(det) <= 1e-14 * scale) return std::nullopt; // parallel or degenerate segment
    const double inv = 1.0 / det;
    const Vec3 s = p0 - a;
    const double u = inv * s.dot(h);
    if (u < 0 || u > 1) return std::nullopt;
    const Vec3 q = s.cross(e1);
    const double v = inv * dir.dot(q);
    if (v < 0 || u + v > 1) return std::nullopt;
    const double t = inv * e2.dot(q);
    if (t < 0 || t > 1) return std::nullopt;
    return t;
}

inline double segment_triangle_squared_distance(const Vec3 &p0, const Vec3 &p1, const Vec3 &a, const Vec3 &b,
                                                const Vec3 &c) {
    if (segment_triangle_crossing(p0, p1, a, b, c)) return 0.0;
    double best = (closest_point_on_triangle(p0, a, b, c).point - p0).squaredNorm();
    best = std::min(best, (closest_point_on_triangle(p1, a, b, c).point - p1).squaredNorm());
    const std::array<std::pair<const Vec3 *, const Vec3 *>, 3> edges{{{&a, &b}, {&b, &c}, {&c, &a}}};
    for (const auto &[u, v] : edges) {
        const auto cp = closest_points_segments(p0, p1, *u, *v);
        best = std::min(best, (cp.on_first - cp.on_second).squaredNorm());
    }
    return best;
}

struct ClosestHit {
    double squared_distance = std::numeric_limits<double>::infinity();
    size_t triangle = 0;
    Vec3 point = Vec3::Zero();
    Feature feature = Feature::Face;
};

/// Median-split AABB tree over a triangle set. Holds its own copy of the
/// triangle corners; safe for concurrent read-only queries.
class TriangleBvh {
public:
    TriangleBvh() = default;
    TriangleBvh(const std::vector<Vec3> &vertices, const std::vector<Tri> &triangles, int leaf_size = 4)
        : m_leafSize(std::max(1, leaf_size)) {
        const size_t n = triangles.size();
        m_corners.resize(n);
        m_order.resize(n);
        std::iota(m_order.begin(), m_order.end(), size_t{0});
        std::vector<Vec3> centroids(n);
        for (size_t i = 0; i < n; ++i) {
            for (int k = 0; k < 3; ++k) m_corners[i][k] = vertices[triangles[i][k]];
            centroids[i] = (m_corners[i][0] + m_corners[i][1] + m_corners[i][2]) / 3.0;
        }
        if (n) {
            m_nodes.reserve(2 * n / m_leafSize + 1);
            m_nodes.emplace_back();
            build_into(0, 0, n, centroids);
        }
        // Reorder corner storage to leaf order for locality.
        std::vector<std::array<Vec3, 3>> reordered(n);
        for (size_t i = 0; i < n; ++i) reordered[i] = m_corners[m_order[i]];
        m_corners = std::move(reordered);
    }

    bool empty() const { return m_nodes.empty(); }
    size_t size() const { return m_order.size(); }
    Aabb bounds() const { return m_nodes.empty() ? Aabb{} : m_nodes[0].box; }

    /// Closest surface point to p. `triangle` is the index in the input list.
    ClosestHit closest(const Vec3 &p) const {
        ClosestHit best;
        if (m_nodes.empty()) return best;
        size_t stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top) {
            const Node &node = m_nodes[stack[--top]];
            if (node.box.squared_distance(p) >= best.squared_distance) continue;
            if (node.count) {
                for (size_t i = node.first; i < node.first + node.count; ++i) {
                    const auto &c = m_corners[i];
                    const TriangleHit h = closest_point_on_triangle(p, c[0], c[1], c[2]);
                    const double d2 = (h.point - p).squaredNorm();
                    if (d2 < best.squared_distance) best = {d2, m_order[i], h.point, h.feature};
                }
                continue;
            }
            const size_t l = node.left, r = node.left + 1;
            const double dl = m_nodes[l].box.squared_distance(p), dr = m_nodes[r].box.squared_distance(p);
            // Push the farther child first so the nearer one is visited next.
            if (dl < dr) {
                stack[top++] = r;
                stack[top++] = l;
            } else {
                stack[top++] = l;
                stack[top++] = r;
            }
        }
        return best;
    }

    /// Parameters t in [0,1] of every crossing between segment p0->p1 and the
    /// triangles (unsorted, may contain near-duplicates at shared edges).
    std::vector<double> crossings(const Vec3 &p0, const Vec3 &p1) const {
        std::vector<double> out;
        if (m_nodes.empty() || p0 == p1) return out;
        const Vec3 dir = p1 - p0;
        const Vec3 inv = dir.cwiseInverse();
        size_t stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top) {
            const Node &node = m_nodes[stack[--top]];
            if (!segment_hits_box(p0, dir, inv, node.box)) continue;
            if (node.count) {
                for (size_t i = node.first; i < node.first + node.count; ++i) {
                    const auto &c = m_corners[i];
                    if (auto t = segment_triangle_crossing(p0, p1, c[0], c[1], c[2])) out.push_back(*t);
                }
                continue;
            }
            stack[top++] = node.left;
            stack[top++] = node.left + 1;
        }
        return out;
    }

    /// Unsigned distance between segment p0p1 and the triangle set.
    double segment_distance(const Vec3 &p0, const Vec3 &p1) const {
        if (m_nodes.empty()) return std::numeric_limits<double>::infinity();
        Aabb seg;
        seg.extend(p0);
        seg.extend(p1);
        double best = std::numeric_limits<double>::infinity();
        size_t stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top) {
            const Node &node = m_nodes[stack[--top]];
            if (node.box.squared_distance(seg) >= best) continue;
            if (node.count) {
                for (size_t i = node.first; i < node.first + node.count; ++i) {
                    const auto &c = m_corners[i];
                    best = std::min(best, segment_triangle_squared_distance(p0, p1, c[0], c[1], c[2]));
                }
                if (best == 0) break;
                continue;
            }
            const size_t l = node.left, r = node.left + 1;
            if (m_nodes[l].box.squared_distance(seg) < m_nodes[r].box.squared_distance(seg)) {
                stack[top++] = r;
                stack[top++] = l;
            } else {
                stack[top++] = l;
                stack[top++] = r;
            }
        }
        return std::sqrt(best);
    }

private:
    struct Node {
        Aabb box;
        size_t left = 0;  // index of left child; right child is left + 1
        size_t first = 0; // leaf triangle range in m_order
        size_t count = 0; // 0 for interior nodes
    };

    static bool segment_hits_box(const Vec3 &o, const Vec3 &dir, const Vec3 &inv, const Aabb &b) {
        double t0 = 0, t1 = 1;
        for (int k = 0; k < 3; ++k) {
            if (dir[k] == 0) {
                if (o[k] < b.lo[k] || o[k] > b.hi[k]) return false;
                continue;
            }
            double ta = (b.lo[k] - o[k]) * inv[k], tb = (b.hi[k] - o[k]) * inv[k];
            if (ta > tb) std::swap(ta, tb);
            t0 = std::max(t0, ta);
            t1 = std::min(t1, tb);
            if (t0 > t1 * (1 + 1e-12) + 1e-15) return false;
        }
        return true;
    }

    void build_into(size_t slot, size_t first, size_t last, const std::vector<Vec3> &centroids) {
        Aabb box, cbox;
        for (size_t i = first; i < last; ++i) {
            for (const auto &p : m_corners[m_order[i]]) box.extend(p);
            cbox.extend(centroids[m_order[i]]);
        }
        m_nodes[slot].box = box;
        const size_t n = last - first;
        if (n <= static_cast<size_t>(m_leafSize)) {
            m_nodes[slot].first = first;
            m_nodes[slot].count = n;
            return;
        }
        int axis = 0;
        cbox.extent().maxCoeff(&axis);
        const size_t mid = first + n / 2;
        std::nth_element(m_order.begin() + first, m_order.begin() + mid, m_order.begin() + last,
                         [&](size_t a, size_t b) { return centroids[a][axis] < centroids[b][axis]; });
        const size_t left = m_nodes.size();
        m_nodes.emplace_back();
        m_nodes.emplace_back();
        m_nodes[slot].left = left;
        build_into(left, first, mid, centroids);
        build_into(left + 1, mid, last, centroids);
    }

    int m_leafSize = 4;
    std::vector<Node> m_nodes;
    std::vector<size_t> m_order;
    std::vector<std::array<Vec3, 3>> m_corners;
};

} // namespace swept
