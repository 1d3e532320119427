#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "posegate/errors.hpp"

namespace posegate {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;
inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;

// Rotations within this margin of pi have no canonical axis-angle branch.
inline constexpr double kAxisBranchGuard = 1e-9;

/// Element of the rotation group, stored as a unit quaternion with w >= 0.
/// Immutable value type; all operations renormalize so unit norm holds to
/// well below 1e-9 after any chain of operations.
class Rotation {
  public:
    Rotation() : q_(1.0, 0.0, 0.0, 0.0) {}

    explicit Rotation(const Eigen::Quaterniond& q) : q_(q.normalized()) { canonicalize(); }

    explicit Rotation(const Eigen::Matrix3d& m) : q_(m) {
        q_.normalize();
        canonicalize();
    }

    static Rotation identity() { return Rotation(); }

    static Rotation about_x(double rad) {
        return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitX())));
    }
    static Rotation about_y(double rad) {
        return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitY())));
    }
    static Rotation about_z(double rad) {
        return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(rad, Eigen::Vector3d::UnitZ())));
    }

    const Eigen::Quaterniond& quaternion() const { return q_; }
    Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }

    Rotation inverse() const { return Rotation(q_.conjugate()); }

    Rotation operator*(const Rotation& other) const { return Rotation(q_ * other.q_); }

    Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return q_ * v; }

    /// Angle of this rotation in [0, pi].
    double angle() const { return 2.0 * std::atan2(q_.vec().norm(), q_.w()); }

  private:
    void canonicalize() {
        if (q_.w() < 0.0) {
            q_.coeffs() = -q_.coeffs();
        }
    }

    Eigen::Quaterniond q_;  // unit, w >= 0
};

/// Exponential map: rotation vector (rad) -> Rotation.
inline Rotation exp_rotation(const Eigen::Vector3d& rotation_vector) {
    const double theta = rotation_vector.norm();
    if (theta < 1e-12) {
        // First-order quaternion; normalization absorbs the O(theta^2) defect.
        return Rotation(Eigen::Quaterniond(1.0, 0.5 * rotation_vector.x(),
                                           0.5 * rotation_vector.y(), 0.5 * rotation_vector.z()));
    }
    return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(theta, rotation_vector / theta)));
}

/// Logarithm map: Rotation -> rotation vector (rad), canonical branch
/// |v| < pi. Throws AmbiguousAxisError at the pi branch point.
inline Eigen::Vector3d log_rotation(const Rotation& r) {
    const Eigen::Quaterniond& q = r.quaternion();  // w >= 0 by construction
    const double sin_half = q.vec().norm();
    const double angle = 2.0 * std::atan2(sin_half, q.w());
    if (angle >= kPi - kAxisBranchGuard) {
        throw AmbiguousAxisError("rotation angle at pi: axis-angle branch is ambiguous");
    }
    // v = (theta / sin(theta/2)) * q.vec(); the factor tends to 2 as theta -> 0.
    const double factor = (sin_half < 1e-12) ? 2.0 : angle / sin_half;
    return factor * q.vec();
}

/// Relative rotation angle between a and b (angle of a^-1 b), radians in [0, pi].
inline double rotation_angle_rad(const Rotation& a, const Rotation& b) {
    return (a.inverse() * b).angle();
}

inline double rotation_angle_deg(const Rotation& a, const Rotation& b) {
    return rotation_angle_rad(a, b) * kDegPerRad;
}

/// Rigid transform: rotation plus translation in millimeters. Composition
/// convention: compose(a, b) applies b first, then a.
struct Pose {
    Rotation rotation;
    Eigen::Vector3d translation{Eigen::Vector3d::Zero()};  // mm

    static Pose identity() { return Pose{}; }
};

inline Pose compose(const Pose& a, const Pose& b) {
    return Pose{a.rotation * b.rotation, a.translation + a.rotation * b.translation};
}

inline Pose inverse(const Pose& a) {
    const Rotation rinv = a.rotation.inverse();
    return Pose{rinv, -(rinv * a.translation)};
}

inline Eigen::Vector3d transform_point(const Pose& p, const Eigen::Vector3d& x) {
    return p.rotation * x + p.translation;
}

/// Body-frame pose increment: axis-angle rotation vector (rad, |v| < pi)
/// plus translation (mm) expressed in the base pose's frame.
struct PoseDelta {
    Eigen::Vector3d rotation_vector{Eigen::Vector3d::Zero()};  // rad
    Eigen::Vector3d translation{Eigen::Vector3d::Zero()};      // mm

    static PoseDelta zero() { return PoseDelta{}; }
};

/// Right (body-frame) difference: target = apply_delta(base, pose_diff(target, base)).
inline PoseDelta pose_diff(const Pose& target, const Pose& base) {
    const Pose rel = compose(inverse(base), target);
    return PoseDelta{log_rotation(rel.rotation), rel.translation};
}

inline Pose apply_delta(const Pose& base, const PoseDelta& d) {
    return compose(base, Pose{exp_rotation(d.rotation_vector), d.translation});
}

/// Scales a delta by alpha in (0, 1]: translation component-wise, rotation
/// geodesically (the resulting angle is exactly alpha times the original).
inline PoseDelta scale_delta(const PoseDelta& d, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw InvalidParameterError("scale_delta: alpha must lie in (0, 1]");
    }
    return PoseDelta{alpha * d.rotation_vector, alpha * d.translation};
}

}  // namespace posegate
