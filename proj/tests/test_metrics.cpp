#include "support.hpp"

#include <numbers>

using namespace swept;
using namespace swept::test;

TEST(SphereCircleSdf, Examples) {
    const double R = 0.6, r = 0.3;
    EXPECT_NEAR(analytic_sphere_circle_sdf(Vec3(R + r, 0, 0), R, r), 0, 1e-15);
    EXPECT_NEAR(analytic_sphere_circle_sdf(Vec3(R, 0, 0), R, r), -r, 1e-15);
    EXPECT_NEAR(analytic_sphere_circle_sdf(Vec3(0, 0, 0), R, r), R - r, 1e-15);
    EXPECT_NEAR(analytic_sphere_circle_sdf(Vec3(0, R, r), R, r), 0, 1e-15);
    EXPECT_THROW(SphereCircleReference(0.3, 0.6), ValidationError);
}

TEST(BoxSdf, MatchesOracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 3);
    const Vec3 lo(0, 0, 0), hi(2, 1, 1);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 p(u(rng), u(rng), u(rng));
        EXPECT_NEAR(box_sdf(p, lo, hi), box_oracle(p, lo, hi), 1e-12);
    }
}

TEST(Sampling, TorusSamplerIsAreaUniform) {
    const double R = 0.6, r = 0.3;
    const SphereCircleReference ref(R, r);
    std::mt19937_64 rng(1);
    const auto pts = ref.sample(100000, rng);
    size_t outer = 0;
    for (const auto &p : pts) {
        EXPECT_NEAR(ref.distance(p), 0, 1e-12);
        outer += std::hypot(p[0], p[1]) > R;
    }
    // Area with cos(phi) > 0 is (pi R + 2 r) / (2 pi R) of the total.
    const double expected = (std::numbers::pi * R + 2 * r) / (2 * std::numbers::pi * R);
    EXPECT_NEAR(static_cast<double>(outer) / pts.size(), expected, 0.01);
}

TEST(Sampling, MeshSamplerIsAreaUniform) {
    // Two unequal triangles with areas 0.5 and 3.
    SurfaceMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {8, 0, 0}, {5, 2, 0}};
    m.triangles = {{0, 1, 2}, {3, 4, 5}};
    std::mt19937_64 rng(2);
    size_t big = 0;
    for (const auto &p : sample_surface(m, 40000, rng)) big += p[0] >= 5;
    EXPECT_NEAR(big / 40000.0, 3 / 3.5, 0.01);
}

TEST(Metrics, SelfDistanceIsZero) {
    const SurfaceMesh m = primitives::icosphere(0.5, 3);
    const auto e = compute_metrics(m, MeshReference(m), 20000);
    EXPECT_NEAR(e.chamfer, 0, 1e-12);
    EXPECT_NEAR(e.hausdorff, 0, 1e-12);
    const auto t = compute_metrics(primitives::box(Vec3::Zero(), Vec3(2, 1, 1)), BoxReference(Vec3::Zero(), Vec3(2, 1, 1)), 20000);
    EXPECT_NEAR(t.hausdorff, 0, 1e-12);
}

TEST(Metrics, IcosphereAgainstAnalyticSphere) {
    const SurfaceMesh m = primitives::icosphere(1.0, 4);
    const auto e = compute_metrics(m, SphereReference(Vec3::Zero(), 1.0));
    EXPECT_LT(e.chamfer_permille(), 0.5);
    EXPECT_NEAR(e.diagonal, 2 * std::sqrt(3.0), 1e-15);
    // Hausdorff is bounded by the largest chord sagitta; face centers sit inside.
    double sag = 0;
    for (const auto &t : m.triangles) {
        const Vec3 c = (m.vertices[t[0]] + m.vertices[t[1]] + m.vertices[t[2]]) / 3;
        sag = std::max(sag, 1 - c.norm());
    }
    EXPECT_LE(e.hausdorff, sag + 1e-9);
    EXPECT_GT(e.hausdorff, 0.5 * sag);
}

TEST(Metrics, ShiftedSphereHasKnownError) {
    const SurfaceMesh m = primitives::icosphere(1.05, 5);
    const auto e = compute_metrics(m, SphereReference(Vec3::Zero(), 1.0), 50000);
    EXPECT_NEAR(e.chamfer, 0.05, 2e-3);
    EXPECT_NEAR(e.hausdorff, 0.05, 2e-3);
}

TEST(Metrics, ThreadCountDoesNotChangeResult) {
    const SurfaceMesh m = primitives::icosphere(0.9, 3);
    const SphereReference ref(Vec3::Zero(), 1.0);
    const auto a = compute_metrics(m, ref, 30000, 5, 1);
    const auto b = compute_metrics(m, ref, 30000, 5, 4);
    EXPECT_EQ(a.chamfer, b.chamfer);
    EXPECT_EQ(a.hausdorff, b.hausdorff);
}

TEST(Metrics, EmptyMeshIsAnError) {
    EXPECT_THROW(compute_metrics(SurfaceMesh{}, SphereReference(Vec3::Zero(), 1)), Error);
}
