#pragma once
// Rigid trajectories over t in [0,1], their inverses, and uniform temporal
// discretization.

#include "swept/distance.hpp"

#include <json.hpp>

#include <numbers>
#include <variant>

namespace swept {

/// Rotation (unit quaternion) followed by translation: x -> R x + t.
struct RigidTransform {
    Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
    Vec3 translation = Vec3::Zero();

    static RigidTransform identity() { return {}; }
    static RigidTransform translate(const Vec3 &t) { return {Eigen::Quaterniond::Identity(), t}; }
    /// Rotation by `angle` about the line through `point` with direction `axis`.
    static RigidTransform rotate_about(const Vec3 &point, const Vec3 &axis, double angle) {
        const Eigen::Quaterniond q(Eigen::AngleAxisd(angle, axis.normalized()));
        return {q, point - (q * point)};
    }

    Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }

    RigidTransform inverse() const {
        const Eigen::Quaterniond qi = rotation.conjugate();
        return {qi, -(qi * translation)};
    }

    /// (*this) o other: apply `other` first.
    RigidTransform compose(const RigidTransform &other) const {
        Eigen::Quaterniond q = rotation * other.rotation;
        q.normalize();
        return {q, rotation * other.translation + translation};
    }
};

struct TimeInterval {
    size_t index = 0;
    double t_start = 0, t_end = 1;
};

namespace motion {

/// Arc-length parameterized polyline of positions; orientation fixed.
struct Translation {
    std::vector<Vec3> path;
};

/// Translation along a circle of `radius` around `center` in the plane normal
/// to `axis`, sweeping `angle` radians from `start_dir`. Orientation fixed.
struct Circular {
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    double radius = 1;
    double angle = 2 * std::numbers::pi;
    Vec3 start_dir = Vec3::UnitX();
};

/// Rotation by angle*t about the axis line, advancing pitch per full turn.
struct Screw {
    Vec3 axis_point = Vec3::Zero();
    Vec3 axis_dir = Vec3::UnitZ();
    double angle = 2 * std::numbers::pi;
    double pitch = 0;
};

struct Keyframe {
    double t;
    RigidTransform pose;
};

/// Slerp rotation + linear translation between adjacent keyframes.
struct Keyframes {
    std::vector<Keyframe> frames;
};

struct Static {};

} // namespace motion

/// f(t): [0,1] -> SE(3). Immutable; evaluation is pure.
class Trajectory {
public:
    using Variant = std::variant<motion::Static, motion::Translation, motion::Circular, motion::Screw, motion::Keyframes>;

    Trajectory() = default;
    Trajectory(Variant v) : m_variant(std::move(v)) { validate(); }

    static Trajectory stationary() { return Trajectory(motion::Static{}); }
    static Trajectory linear(const Vec3 &offset) { return Trajectory(motion::Translation{{Vec3::Zero(), offset}}); }

    const Variant &variant() const { return m_variant; }

    RigidTransform evaluate(double t) const {
        if (!(t >= 0.0 && t <= 1.0)) throw Error("motion", "time " + std::to_string(t) + " outside [0,1]");
        return std::visit([t](const auto &m) { return eval(m, t); }, m_variant);
    }

    /// Model-frame position of world point q at time t: f(t)^-1 q.
    Vec3 inverse_point(const Vec3 &q, double t) const { return evaluate(t).inverse().apply(q); }

    /// Linearized inverse trajectory of q over `interval`.
    Segment3 inverse_point_positions(const Vec3 &q, const TimeInterval &interval) const {
        return {inverse_point(q, interval.t_start), inverse_point(q, interval.t_end)};
    }

private:
    void validate() const {
        if (const auto *tr = std::get_if<motion::Translation>(&m_variant)) {
            if (tr->path.empty()) throw ValidationError("motion", "translation path is empty");
        } else if (const auto *c = std::get_if<motion::Circular>(&m_variant)) {
            if (c->axis.norm() == 0) throw ValidationError("motion", "circular axis is zero");
            if (c->radius < 0) throw ValidationError("motion", "circular radius is negative");
        } else if (const auto *s = std::get_if<motion::Screw>(&m_variant)) {
            if (s->axis_dir.norm() == 0) throw ValidationError("motion", "screw axis is zero");
        } else if (const auto *k = std::get_if<motion::Keyframes>(&m_variant)) {
            const auto &f = k->frames;
            if (f.size() < 2 || f.front().t != 0.0 || f.back().t != 1.0)
                throw ValidationError("motion", "keyframes must include t=0 and t=1");
            for (size_t i = 1; i < f.size(); ++i)
                if (!(f[i].t > f[i - 1].t)) throw ValidationError("motion", "keyframe times must strictly increase");
        }
    }

    static RigidTransform eval(const motion::Static &, double) { return {}; }

    static RigidTransform eval(const motion::Translation &m, double t) {
        const auto &p = m.path;
        double total = 0;
        for (size_t i = 1; i < p.size(); ++i) total += (p[i] - p[i - 1]).norm();
        if (total == 0) return RigidTransform::translate(p.front());
        double remaining = t * total;
        for (size_t i = 1; i < p.size(); ++i) {
            const double len = (p[i] - p[i - 1]).norm();
            if (remaining <= len && len > 0) return RigidTransform::translate(p[i - 1] + (remaining / len) * (p[i] - p[i - 1]));
            remaining -= len;
        }
        return RigidTransform::translate(p.back());
    }

    static RigidTransform eval(const motion::Circular &m, double t) {
        const Vec3 a = m.axis.normalized();
        Vec3 u = m.start_dir - m.start_dir.dot(a) * a;
        if (u.norm() < 1e-12) u = a.unitOrthogonal();
        u.normalize();
        const Vec3 v = a.cross(u);
        const double phi = m.angle * t;
        return RigidTransform::translate(m.center + m.radius * (std::cos(phi) * u + std::sin(phi) * v));
    }

    static RigidTransform eval(const motion::Screw &m, double t) {
        const Vec3 dir = m.axis_dir.normalized();
        const double phi = m.angle * t;
        RigidTransform r = RigidTransform::rotate_about(m.axis_point, dir, phi);
        r.translation += m.pitch * (phi / (2 * std::numbers::pi)) * dir;
        return r;
    }

    static RigidTransform eval(const motion::Keyframes &m, double t) {
        const auto &f = m.frames;
        size_t i = 1;
        while (i + 1 < f.size() && f[i].t < t) ++i;
        const double s = (t - f[i - 1].t) / (f[i].t - f[i - 1].t);
        RigidTransform r;
        r.rotation = f[i - 1].pose.rotation.slerp(s, f[i].pose.rotation).normalized();
        r.translation = (1 - s) * f[i - 1].pose.translation + s * f[i].pose.translation;
        return r;
    }

    Variant m_variant = motion::Static{};
};

/// N uniform intervals tiling [0,1].
inline std::vector<TimeInterval> discretize(size_t n) {
    if (n == 0) throw ValidationError("motion", "number of time steps must be >= 1");
    std::vector<TimeInterval> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = {i, static_cast<double>(i) / static_cast<double>(n),
                  i + 1 == n ? 1.0 : static_cast<double>(i + 1) / static_cast<double>(n)};
    return out;
}

/// Inverse transforms f(t_k)^-1 at the N+1 interval endpoints.
inline std::vector<RigidTransform> endpoint_inverses(const Trajectory &traj, const std::vector<TimeInterval> &intervals) {
    std::vector<RigidTransform> inv;
    inv.reserve(intervals.size() + 1);
    for (const auto &iv : intervals) inv.push_back(traj.evaluate(iv.t_start).inverse());
    if (!intervals.empty()) inv.push_back(traj.evaluate(intervals.back().t_end).inverse());
    return inv;
}

// ---------------------------------------------------------------------------
// JSON trajectory records

namespace detail {
inline Vec3 vec3_from_json(const nlohmann::json &j, const char *key) {
    if (!j.contains(key)) throw ValidationError("motion", std::string("missing key '") + key + "'");
    const auto &a = j.at(key);
    if (!a.is_array() || a.size() != 3) throw ValidationError("motion", std::string("'") + key + "' must be [x,y,z]");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}
inline nlohmann::json vec3_to_json(const Vec3 &v) { return nlohmann::json::array({v[0], v[1], v[2]}); }
} // namespace detail

inline Trajectory trajectory_from_json(const nlohmann::json &j) {
    using detail::vec3_from_json;
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "static") return Trajectory::stationary();
        if (type == "translation") {
            motion::Translation m;
            if (j.contains("path")) {
                for (const auto &p : j.at("path")) m.path.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
            } else {
                m.path = {Vec3::Zero(), vec3_from_json(j, "offset")};
            }
            return Trajectory(m);
        }
        if (type == "circular") {
            motion::Circular m;
            if (j.contains("center")) m.center = vec3_from_json(j, "center");
            if (j.contains("axis")) m.axis = vec3_from_json(j, "axis");
            if (j.contains("start_dir")) m.start_dir = vec3_from_json(j, "start_dir");
            m.radius = j.at("radius").get<double>();
            m.angle = j.value("angle", 2 * std::numbers::pi);
            return Trajectory(m);
        }
        if (type == "screw" || type == "rotation") {
            motion::Screw m;
            m.axis_point = vec3_from_json(j, "axis_point");
            m.axis_dir = vec3_from_json(j, "axis_dir");
            m.angle = j.at("angle").get<double>();
            m.pitch = type == "screw" ? j.value("pitch", 0.0) : 0.0;
            return Trajectory(m);
        }
        if (type == "keyframes") {
            motion::Keyframes m;
            for (const auto &k : j.at("frames")) {
                motion::Keyframe f{k.at("t").get<double>(), {}};
                if (k.contains("rotation")) {
                    const auto &q = k.at("rotation"); // [w, x, y, z]
                    f.pose.rotation = Eigen::Quaterniond(q.at(0).get<double>(), q.at(1).get<double>(),
                                                         q.at(2).get<double>(), q.at(3).get<double>());
                    if (f.pose.rotation.norm() == 0) throw ValidationError("motion", "zero keyframe quaternion");
                    f.pose.rotation.normalize();
                }
                if (k.contains("translation")) f.pose.translation = vec3_from_json(k, "translation");
                m.frames.push_back(f);
            }
            return Trajectory(m);
        }
        throw ValidationError("motion", "unknown trajectory type '" + type + "'");
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError("motion", std::string("malformed trajectory: ") + e.what());
    }
}

inline nlohmann::json trajectory_to_json(const Trajectory &traj) {
    using detail::vec3_to_json;
    nlohmann::json j;
    std::visit(
        [&](const auto &m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, motion::Static>) {
                j = {{"type", "static"}};
            } else if constexpr (std::is_same_v<T, motion::Translation>) {
                j = {{"type", "translation"}, {"path", nlohmann::json::array()}};
                for (const auto &p : m.path) j["path"].push_back(vec3_to_json(p));
            } else if constexpr (std::is_same_v<T, motion::Circular>) {
                j = {{"type", "circular"}, {"center", vec3_to_json(m.center)}, {"axis", vec3_to_json(m.axis)},
                     {"radius", m.radius}, {"angle", m.angle}, {"start_dir", vec3_to_json(m.start_dir)}};
            } else if constexpr (std::is_same_v<T, motion::Screw>) {
                j = {{"type", "screw"}, {"axis_point", vec3_to_json(m.axis_point)},
                     {"axis_dir", vec3_to_json(m.axis_dir)}, {"angle", m.angle}, {"pitch", m.pitch}};
            } else {
                j = {{"type", "keyframes"}, {"frames", nlohmann::json::array()}};
                for (const auto &f : m.frames) {
                    const auto &q = f.pose.rotation;
                    j["frames"].push_back({{"t", f.t},
                                           {"rotation", {q.w(), q.x(), q.y(), q.z()}},
                                           {"translation", vec3_to_json(f.pose.translation)}});
                }
            }
        },
        traj.variant());
    return j;
}

} // namespace swept
