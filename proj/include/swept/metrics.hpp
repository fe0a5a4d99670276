#pragma once
// Surface-to-surface error: area-uniform point samples on both sides,
// closest-point distances, Chamfer (L1) and Hausdorff distances normalized by
// the reference bounding-box diagonal.

#include "swept/detail/parallel.hpp"
#include "swept/distance.hpp"

#include <memory>
#include <numbers>
#include <random>

namespace swept {

/// sqrt((sqrt(px^2 + py^2) - R)^2 + pz^2) - r: a sphere of radius r swept
/// around the full circle of radius R about the z axis.
inline double analytic_sphere_circle_sdf(const Vec3 &p, double R, double r) {
    const double q = std::hypot(p[0], p[1]) - R;
    return std::hypot(q, p[2]) - r;
}

inline double box_sdf(const Vec3 &p, const Vec3 &lo, const Vec3 &hi) {
    const Vec3 c = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const Vec3 q = (p - c).cwiseAbs() - half;
    return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

/// Area-uniform samples on a triangle set.
inline std::vector<Vec3> sample_surface(const SurfaceMesh &m, size_t n, std::mt19937_64 &rng) {
    std::vector<double> cdf;
    cdf.reserve(m.triangles.size());
    double total = 0;
    for (const auto &t : m.triangles) {
        total += triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        cdf.push_back(total);
    }
    if (total <= 0) throw Error("metrics", "cannot sample a surface with zero area");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec3> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const double u = unit(rng) * total;
        const size_t f = std::min<size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), cdf.size() - 1);
        double a = unit(rng), b = unit(rng);
        if (a + b > 1) {
            a = 1 - a;
            b = 1 - b;
        }
        const auto &t = m.triangles[f];
        const Vec3 &p0 = m.vertices[t[0]];
        out.push_back(p0 + a * (m.vertices[t[1]] - p0) + b * (m.vertices[t[2]] - p0));
    }
    return out;
}

/// A surface to measure against: unsigned distance plus an area-uniform sampler.
class Reference {
public:
    virtual ~Reference() = default;
    virtual double distance(const Vec3 &p) const = 0;
    virtual std::vector<Vec3> sample(size_t n, std::mt19937_64 &rng) const = 0;
    virtual Aabb bounds() const = 0;
};

class SphereReference final : public Reference {
public:
    SphereReference(const Vec3 &center, double radius) : m_c(center), m_r(radius) {}
    double distance(const Vec3 &p) const override { return std::abs((p - m_c).norm() - m_r); }
    std::vector<Vec3> sample(size_t n, std::mt19937_64 &rng) const override {
        std::normal_distribution<double> g;
        std::vector<Vec3> out(n);
        for (auto &p : out) {
            Vec3 v(g(rng), g(rng), g(rng));
            while (v.norm() == 0) v = Vec3(g(rng), g(rng), g(rng));
            p = m_c + m_r * v.normalized();
        }
        return out;
    }
    Aabb bounds() const override { return {m_c - Vec3::Constant(m_r), m_c + Vec3::Constant(m_r)}; }

private:
    Vec3 m_c;
    double m_r;
};

/// Torus swept by a sphere of radius r around a circle of radius R (z axis).
class SphereCircleReference final : public Reference {
public:
    SphereCircleReference(double R, double r) : m_R(R), m_r(r) {
        if (!(R > r && r > 0)) throw ValidationError("metrics", "sphere-circle reference needs R > r > 0");
    }
    double distance(const Vec3 &p) const override { return std::abs(analytic_sphere_circle_sdf(p, m_R, m_r)); }
    std::vector<Vec3> sample(size_t n, std::mt19937_64 &rng) const override {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Vec3> out;
        out.reserve(n);
        const double tau = 2 * std::numbers::pi;
        // Area element is proportional to R + r cos(phi): rejection on phi.
        while (out.size() < n) {
            const double theta = tau * unit(rng), phi = tau * unit(rng);
            if (unit(rng) * (m_R + m_r) > m_R + m_r * std::cos(phi)) continue;
            const double rho = m_R + m_r * std::cos(phi);
            out.emplace_back(rho * std::cos(theta), rho * std::sin(theta), m_r * std::sin(phi));
        }
        return out;
    }
    Aabb bounds() const override {
        const double e = m_R + m_r;
        return {Vec3(-e, -e, -m_r), Vec3(e, e, m_r)};
    }

private:
    double m_R, m_r;
};

class BoxReference final : public Reference {
public:
    BoxReference(const Vec3 &lo, const Vec3 &hi) : m_lo(lo), m_hi(hi) {}
    double distance(const Vec3 &p) const override { return std::abs(box_sdf(p, m_lo, m_hi)); }
    std::vector<Vec3> sample(size_t n, std::mt19937_64 &rng) const override {
        return sample_surface(primitives::box(m_lo, m_hi), n, rng);
    }
    Aabb bounds() const override { return {m_lo, m_hi}; }

private:
    Vec3 m_lo, m_hi;
};

/// Arbitrary triangle set as reference (need not be closed).
class MeshReference final : public Reference {
public:
    explicit MeshReference(SurfaceMesh mesh) : m_mesh(std::move(mesh)), m_bvh(m_mesh.vertices, m_mesh.triangles) {
        if (m_mesh.triangles.empty()) throw Error("metrics", "reference mesh is empty");
    }
    double distance(const Vec3 &p) const override { return std::sqrt(m_bvh.closest(p).squared_distance); }
    std::vector<Vec3> sample(size_t n, std::mt19937_64 &rng) const override { return sample_surface(m_mesh, n, rng); }
    Aabb bounds() const override { return m_mesh.bounds(); }
    const SurfaceMesh &mesh() const { return m_mesh; }

private:
    SurfaceMesh m_mesh;
    TriangleBvh m_bvh;
};

struct SurfaceError {
    double chamfer = 0;   // mean of the two directed mean distances (absolute units)
    double hausdorff = 0; // max of the two directed maxima (absolute units)
    double diagonal = 1;  // reference bounding-box diagonal
    double chamfer_permille() const { return 1000.0 * chamfer / diagonal; }
    double hausdorff_percent() const { return 100.0 * hausdorff / diagonal; }
};

namespace detail {
struct Directed {
    double mean = 0, max = 0;
};

template <typename Dist>
Directed directed(const std::vector<Vec3> &pts, Dist &&dist, unsigned threads) {
    constexpr size_t kChunks = 64;
    std::vector<double> sums(kChunks, 0.0), maxes(kChunks, 0.0);
    parallel_chunks(pts.size(), kChunks, threads, [&](size_t c, size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            const double d = dist(pts[i]);
            sums[c] += d;
            maxes[c] = std::max(maxes[c], d);
        }
    });
    Directed out;
    for (size_t c = 0; c < kChunks; ++c) {
        out.mean += sums[c];
        out.max = std::max(out.max, maxes[c]);
    }
    out.mean /= static_cast<double>(pts.size());
    return out;
}
} // namespace detail

inline SurfaceError compute_metrics(const SurfaceMesh &result, const Reference &reference, size_t samples = 100000,
                                    uint64_t seed = 12345, unsigned threads = 1) {
    if (result.triangles.empty()) throw Error("metrics", "result mesh is empty");
    std::mt19937_64 rng(seed);
    const std::vector<Vec3> onResult = sample_surface(result, samples, rng);
    const std::vector<Vec3> onReference = reference.sample(samples, rng);
    const TriangleBvh bvh(result.vertices, result.triangles);

    const auto a = detail::directed(onResult, [&](const Vec3 &p) { return reference.distance(p); }, threads);
    const auto b = detail::directed(onReference, [&](const Vec3 &p) { return std::sqrt(bvh.closest(p).squared_distance); }, threads);
    SurfaceError e;
    e.chamfer = 0.5 * (a.mean + b.mean);
    e.hausdorff = std::max(a.max, b.max);
    e.diagonal = reference.bounds().diagonal();
    return e;
}

} // namespace swept
