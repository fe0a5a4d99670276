#include "support.hpp"

using namespace swept;
using namespace swept::test;

namespace {

const std::array<Vec3, 4> kRightTet{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};

DistanceField field(std::array<double, 4> d, uint32_t interval = 0) { return {interval, d}; }

std::array<Vec3, 4> random_tet(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    for (;;) {
        std::array<Vec3, 4> t;
        for (auto &v : t) v = Vec3(u(rng), u(rng), u(rng));
        // Keep reasonably shaped tets, like grid tets.
        const double vol = std::abs(tet_signed_volume(t[0], t[1], t[2], t[3]));
        double longest = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) longest = std::max(longest, (t[a] - t[b]).norm());
        if (vol > 0.02 * longest * longest * longest) return t;
    }
}

// Symmetric max nearest-vertex distance between two point sets.
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

Vec3 polygon_normal(const std::vector<Vec3> &poly) {
    Vec3 n = Vec3::Zero();
    for (size_t i = 1; i + 1 < poly.size(); ++i) n += (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    return n;
}

} // namespace

TEST(Interpolate, Examples) {
    const auto f = field({1, 2, 3, 4});
    for (int k = 0; k < 4; ++k) EXPECT_EQ(interpolate_field(f, kRightTet, kRightTet[k]), f.d[k]);
    const Vec3 c = 0.25 * (kRightTet[0] + kRightTet[1] + kRightTet[2] + kRightTet[3]);
    EXPECT_NEAR(interpolate_field(f, kRightTet, c), 2.5, 1e-15);
    EXPECT_EQ(envelope_value({field({2.5, 2.5, 2.5, 2.5}), field({-1, -1, -1, -1})}, kRightTet, c), -1);
    EXPECT_EQ(envelope_value({}, kRightTet, c), std::numeric_limits<double>::infinity());
}

TEST(Extract, SingleFieldCornerCut) {
    for (auto route : {ExtractionRoute::Clip3D, ExtractionRoute::Cut4D}) {
        const auto patches = extract_tet_surface(kRightTet, {field({-1, 1, 1, 1})}, route);
        ASSERT_EQ(patches.size(), 1u);
        const auto &poly = patches[0].polygon;
        ASSERT_EQ(poly.size(), 3u);
        EXPECT_LT(set_distance(poly, {Vec3(0.5, 0, 0), Vec3(0, 0.5, 0), Vec3(0, 0, 0.5)}), 1e-12);
        EXPECT_GT(polygon_normal(poly).dot(Vec3(1, 1, 1)), 0); // faces away from the inside corner
        const auto mt = marching_tet(kRightTet, {-1, 1, 1, 1});
        ASSERT_EQ(mt.size(), 1u);
        EXPECT_LT(set_distance(poly, {mt[0][0], mt[0][1], mt[0][2]}), 1e-12);
    }
}

TEST(Extract, EmptyCases) {
    for (auto route : {ExtractionRoute::Clip3D, ExtractionRoute::Cut4D}) {
        EXPECT_TRUE(extract_tet_surface(kRightTet, {field({0.1, 1, 2, 3})}, route).empty());
        EXPECT_TRUE(extract_tet_surface(kRightTet, {field({-0.1, -1, -2, -3})}, route).empty());
        EXPECT_TRUE(extract_tet_surface(kRightTet, {field({1, 1, 1, 1}), field({-1, -1, -1, -1}, 1)}, route).empty());
        EXPECT_TRUE(extract_tet_surface(kRightTet, {}, route).empty());
    }
}

TEST(Extract, TwoFieldCreaseMatchesDenseSampling) {
    // Two planes crossing inside the tet: x + y < 0.6 and z < 0.3 are "inside".
    const auto a = field({-0.6, 0.4, 0.4, -0.6}, 0); // x + y - 0.6
    const auto b = field({-0.3, -0.3, -0.3, 0.7}, 1); // z - 0.3
    for (auto route : {ExtractionRoute::Clip3D, ExtractionRoute::Cut4D}) {
        const auto patches = extract_tet_surface(kRightTet, {a, b}, route);
        ASSERT_EQ(patches.size(), 2u);
        // Shared crease: points present in both patches.
        int shared = 0;
        for (const auto &p : patches[0].polygon)
            for (const auto &q : patches[1].polygon) shared += (p - q).norm() < 1e-12;
        EXPECT_EQ(shared, 2);
        // Dense 50^3 classification of min(a, b) >= 0 against the patch planes.
        int inTet = 0, mismatches = 0;
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j)
                for (int k = 0; k < 50; ++k) {
                    const Vec3 x((i + 0.5) / 50, (j + 0.5) / 50, (k + 0.5) / 50);
                    if (barycentric(kRightTet, x).minCoeff() < 0) continue;
                    ++inTet;
                    const double m = envelope_value({a, b}, kRightTet, x);
                    if (std::abs(m) < 1e-9) continue;
                    bool kept = true;
                    for (const auto &p : patches) kept &= (x - p.polygon[0]).dot(polygon_normal(p.polygon)) >= 0;
                    mismatches += kept != (m >= 0);
                }
        EXPECT_GT(inTet, 15000);
        EXPECT_EQ(mismatches, 0);
    }
}

TEST(Extract, RoutesAgreeOnRandomTets) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> count(1, 5);
    size_t nonEmpty = 0, multi = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tet = random_tet(rng);
        std::vector<DistanceField> fields;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) fields.push_back(field({u(rng), u(rng), u(rng), u(rng)}, static_cast<uint32_t>(i)));
        const auto a = extract_tet_surface(tet, fields, ExtractionRoute::Clip3D);
        const auto b = extract_tet_surface(tet, fields, ExtractionRoute::Cut4D);
        ASSERT_EQ(a.size(), b.size()) << "trial " << trial;
        nonEmpty += !a.empty();
        multi += a.size() > 1;
        for (size_t i = 0; i < a.size(); ++i) {
            EXPECT_EQ(a[i].interval, b[i].interval);
            EXPECT_EQ(a[i].polygon.size(), b[i].polygon.size()) << "trial " << trial;
            EXPECT_LT(set_distance(a[i].polygon, b[i].polygon), 1e-9) << "trial " << trial;
            EXPECT_GT(polygon_normal(a[i].polygon).dot(polygon_normal(b[i].polygon)), 0);
        }
    }
    EXPECT_GT(nonEmpty, 300u);
    EXPECT_GT(multi, 100u);
}

TEST(Extract, PatchesArePlanarOnTheirField) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 500; ++trial) {
        const auto tet = random_tet(rng);
        std::vector<DistanceField> fields;
        for (uint32_t i = 0; i < 3; ++i) fields.push_back(field({u(rng), u(rng), u(rng), u(rng)}, i));
        for (const auto &p : extract_tet_surface(tet, fields)) {
            const auto &f = fields[p.interval];
            for (const auto &v : p.polygon) EXPECT_NEAR(interpolate_field(f, tet, v), 0, 1e-9);
            const Vec3 g = field_gradient(tet, f.d), n = polygon_normal(p.polygon);
            EXPECT_NEAR(n.normalized().dot(g.normalized()), 1, 1e-9);
        }
    }
}

TEST(Extract, PatchSignClassifiesRandomPoints) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1, 1), w(0, 1);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto tet = random_tet(rng);
        std::vector<DistanceField> fields;
        for (uint32_t i = 0; i < 3; ++i) fields.push_back(field({u(rng), u(rng), u(rng), u(rng)}, i));
        const auto patches = extract_tet_surface(tet, fields);
        if (patches.empty()) continue;
        for (int s = 0; s < 100; ++s) {
            double b[4], sum = 0;
            for (double &x : b) sum += x = -std::log(w(rng) + 1e-300);
            const Vec3 x = (b[0] * tet[0] + b[1] * tet[1] + b[2] * tet[2] + b[3] * tet[3]) / sum;
            const double m = envelope_value(fields, tet, x);
            if (std::abs(m) < 1e-9) continue;
            bool kept = true;
            for (const auto &p : patches) kept &= (x - p.polygon[0]).dot(polygon_normal(p.polygon)) >= 0;
            EXPECT_EQ(kept, m >= 0);
            ++checked;
        }
    }
    EXPECT_GT(checked, 3000);
}

TEST(Extract, SingleFieldEqualsMarchingTets) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    int cut = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto tet = random_tet(rng);
        const std::array<double, 4> d{u(rng), u(rng), u(rng), u(rng)};
        const auto mt = marching_tet(tet, d);
        for (auto route : {ExtractionRoute::Clip3D, ExtractionRoute::Cut4D}) {
            const auto patches = extract_tet_surface(tet, {field(d)}, route);
            ASSERT_EQ(patches.size(), mt.empty() ? 0u : 1u);
            if (mt.empty()) continue;
            std::vector<Vec3> mtPts;
            Vec3 mtNormal = Vec3::Zero();
            double mtArea = 0;
            for (const auto &t : mt) {
                mtPts.insert(mtPts.end(), t.begin(), t.end());
                mtNormal += (t[1] - t[0]).cross(t[2] - t[0]);
                mtArea += triangle_area(t[0], t[1], t[2]);
            }
            const auto &poly = patches[0].polygon;
            EXPECT_EQ(poly.size(), mt.size() + 2);
            EXPECT_LT(set_distance(poly, mtPts), 1e-12);
            EXPECT_NEAR(detail::polygon_area(poly), mtArea, 1e-12);
            EXPECT_GT(polygon_normal(poly).dot(mtNormal), 0);
        }
        ++cut;
    }
    EXPECT_GT(cut, 500);
}

TEST(Assemble, EmptyInputGivesEmptyObj) {
    const SurfaceMesh m = assemble_surface({}, 0.1);
    EXPECT_TRUE(m.vertices.empty());
    EXPECT_TRUE(m.triangles.empty());
    std::stringstream s;
    write_obj(s, m);
    const SurfaceMesh back = parse_obj(s);
    EXPECT_TRUE(back.triangles.empty());
}

TEST(Assemble, AdjacentTetsShareVerticesExactly) {
    const TetGrid g(Vec3::Zero(), 1.0, {2, 1, 1});
    // Find a pair of face neighbors across the cube boundary x = 1.
    TetRef a{{0, 0, 0}, 0}, b{};
    int face = -1;
    for (int l = 0; l < 5 && face < 0; ++l)
        for (const auto &n : g.face_neighbors({{0, 0, 0}, l}))
            if (n.cube[0] == 1) {
                a = {{0, 0, 0}, l};
                b = n;
                face = 0;
                break;
            }
    ASSERT_EQ(face, 0);
    // One global linear field, cut by the plane 0.3x + 0.5y + 0.8z = 0.7.
    auto values = [&](const TetRef &t) {
        std::array<double, 4> d;
        const auto v = g.tet_vertices(t);
        for (int k = 0; k < 4; ++k) d[k] = 0.3 * v[k][0] + 0.5 * v[k][1] + 0.8 * v[k][2] - 0.7;
        return d;
    };
    const auto pa = extract_tet_surface(g.tet_vertices(a), {field(values(a))});
    const auto pb = extract_tet_surface(g.tet_vertices(b), {field(values(b))});
    ASSERT_EQ(pa.size(), 1u);
    ASSERT_EQ(pb.size(), 1u);
    int onFace = 0;
    for (const auto &p : pa[0].polygon) {
        if (std::abs(p[0] - 1) > 1e-12) continue;
        ++onFace;
        const bool exact = std::any_of(pb[0].polygon.begin(), pb[0].polygon.end(), [&](const Vec3 &q) { return q == p; });
        EXPECT_TRUE(exact) << p.transpose();
    }
    EXPECT_EQ(onFace, 2);
    const SurfaceMesh m = assemble_surface({{a, pa}, {b, pb}}, 1.0);
    // A flat disk: every vertex is on its boundary, the shared edge is not.
    EXPECT_EQ(open_edge_count(m), m.vertices.size());
}

TEST(Assemble, DropsSliversAndWelds) {
    std::vector<std::array<Vec3, 3>> soup{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)},
                                          {Vec3(1, 0, 1e-9), Vec3(1, 1, 0), Vec3(0, 1, 0)},
                                          {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}};
    const SurfaceMesh m = assemble_triangles(soup, 1.0);
    EXPECT_EQ(m.triangles.size(), 2u);
    EXPECT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(open_edge_count(m), 4u);
}
