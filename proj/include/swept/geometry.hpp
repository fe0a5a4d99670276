#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace swept {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

/// Base class for every error raised by the library. The stage tag lets the
/// pipeline report where a failure happened ("mesh", "motion", "grid", ...).
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string &what)
        : std::runtime_error(stage + ": " + what), m_stage(std::move(stage)) {}
    const std::string &stage() const { return m_stage; }

private:
    std::string m_stage;
};

/// Input that fails validation (malformed files, open meshes, bad config).
class ValidationError : public Error {
public:
    using Error::Error;
};

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    bool empty() const { return (lo.array() > hi.array()).any(); }
    void extend(const Vec3 &p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void extend(const Aabb &b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    double diagonal() const { return empty() ? 0.0 : extent().norm(); }
    bool contains(const Vec3 &p, double tol = 0.0) const {
        return (p.array() >= lo.array() - tol).all() && (p.array() <= hi.array() + tol).all();
    }
    Aabb padded(double r) const { return {lo - Vec3::Constant(r), hi + Vec3::Constant(r)}; }

    // Squared distance from a point to the box (0 inside).
    double squared_distance(const Vec3 &p) const {
        const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
        return d.squaredNorm();
    }
    double squared_distance(const Aabb &b) const {
        const Vec3 d = (lo - b.hi).cwiseMax(b.lo - hi).cwiseMax(Vec3::Zero());
        return d.squaredNorm();
    }
};

inline double tet_signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d) {
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

/// Barycentric coordinates of p with respect to tet (a, b, c, d).
inline Vec4 barycentric(const std::array<Vec3, 4> &tet, const Vec3 &p) {
    Eigen::Matrix3d m;
    m.col(0) = tet[1] - tet[0];
    m.col(1) = tet[2] - tet[0];
    m.col(2) = tet[3] - tet[0];
    const Vec3 l = m.partialPivLu().solve(p - tet[0]);
    return {1.0 - l.sum(), l[0], l[1], l[2]};
}

inline double triangle_area(const Vec3 &a, const Vec3 &b, const Vec3 &c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

} // namespace swept
