#pragma once
// Point and segment signed-distance queries against a static watertight mesh.

#include "swept/bvh.hpp"

#include <memory>

namespace swept {

struct Segment3 {
    Vec3 p0 = Vec3::Zero(), p1 = Vec3::Zero();

    Vec3 at(double t) const { return p0 + t * (p1 - p0); }
    double length() const { return (p1 - p0).norm(); }
};

/// Parameter range [t0, t1] along a segment.
struct ParamInterval {
    double t0 = 0, t1 = 0;
};

/// A validated mesh plus its query accelerator. Immutable; every query is
/// const and may be issued from any number of threads.
class MeshDistance {
public:
    explicit MeshDistance(TriangleMesh mesh, int leaf_size = 4)
        : m_mesh(std::move(mesh)), m_bvh(m_mesh.vertices(), m_mesh.triangles(), leaf_size) {}

    const TriangleMesh &mesh() const { return m_mesh; }
    const TriangleBvh &bvh() const { return m_bvh; }

    /// Euclidean distance to the surface, negative inside. The sign comes from
    /// the angle-weighted pseudonormal of the closest feature.
    double signed_distance(const Vec3 &q) const {
        const ClosestHit hit = m_bvh.closest(q);
        const double d = std::sqrt(hit.squared_distance);
        if (d == 0) return 0.0;
        const Vec3 &n = m_mesh.pseudonormal(hit.triangle, hit.feature);
        return (q - hit.point).dot(n) < 0 ? -d : d;
    }

    double unsigned_distance(const Vec3 &q) const { return std::sqrt(m_bvh.closest(q).squared_distance); }

    /// Maximal parameter intervals of `seg` that lie inside the mesh. Split
    /// points are the segment/triangle crossings; each piece is classified by
    /// the sign at its midpoint, and adjacent inside pieces are merged.
    std::vector<ParamInterval> clip_segment_interior(const Segment3 &seg) const {
        std::vector<double> cuts = m_bvh.crossings(seg.p0, seg.p1);
        cuts.push_back(0.0);
        cuts.push_back(1.0);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return b - a <= 1e-12; }),
                   cuts.end());
        cuts.back() = 1.0;

        std::vector<ParamInterval> inside;
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            if (signed_distance(seg.at(0.5 * (a + b))) >= 0) continue;
            if (!inside.empty() && inside.back().t1 == a)
                inside.back().t1 = b;
            else
                inside.push_back({a, b});
        }
        return inside;
    }

    /// min over p in seg of signed_distance(p). Outside segments use the exact
    /// segment-to-surface distance; inside portions are sampled with
    /// `interior_samples` endpoint-inclusive points per interval.
    double segment_signed_distance(const Segment3 &seg, int interior_samples = 10) const {
        if (interior_samples < 2) throw Error("mesh", "interior_samples must be >= 2");
        if (seg.p0 == seg.p1) return signed_distance(seg.p0);
        const auto inside = clip_segment_interior(seg);
        if (inside.empty()) return m_bvh.segment_distance(seg.p0, seg.p1);
        double best = std::numeric_limits<double>::infinity();
        for (const auto &iv : inside)
            for (int k = 0; k < interior_samples; ++k) {
                const double t = iv.t0 + (iv.t1 - iv.t0) * k / (interior_samples - 1);
                best = std::min(best, signed_distance(seg.at(t)));
            }
        return best;
    }

private:
    TriangleMesh m_mesh;
    TriangleBvh m_bvh;
};

} // namespace swept
