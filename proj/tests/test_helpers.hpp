#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "posegate/rng.hpp"
#include "posegate/se3.hpp"

namespace posegate::testing {

inline Eigen::Vector3d random_unit_vector(Rng& rng) {
    Eigen::Vector3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
    while (v.norm() < 1e-6) {
        v = Eigen::Vector3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    }
    return v.normalized();
}

/// Random rotation with angle uniform in [0, max_angle_rad].
inline Rotation random_rotation(Rng& rng, double max_angle_rad = 3.0) {
    return exp_rotation(random_unit_vector(rng) * rng.uniform(0.0, max_angle_rad));
}

/// Random pose with translation components uniform in [-extent, extent] mm.
inline Pose random_pose(Rng& rng, double extent_mm = 500.0, double max_angle_rad = 3.0) {
    return Pose{random_rotation(rng, max_angle_rad),
                Eigen::Vector3d(rng.uniform(-extent_mm, extent_mm),
                                rng.uniform(-extent_mm, extent_mm),
                                rng.uniform(-extent_mm, extent_mm))};
}

inline PoseDelta random_delta(Rng& rng, double max_angle_rad = 3.0, double extent_mm = 200.0) {
    return PoseDelta{random_unit_vector(rng) * rng.uniform(0.0, max_angle_rad),
                     Eigen::Vector3d(rng.uniform(-extent_mm, extent_mm),
                                     rng.uniform(-extent_mm, extent_mm),
                                     rng.uniform(-extent_mm, extent_mm))};
}

/// Independent oracle: 4x4 homogeneous matrix form of a pose.
inline Eigen::Matrix4d homogeneous(const Pose& p) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.block<3, 3>(0, 0) = p.rotation.matrix();
    m.block<3, 1>(0, 3) = p.translation;
    return m;
}

inline double rotation_distance_rad(const Rotation& a, const Rotation& b) {
    return rotation_angle_rad(a, b);
}

inline double translation_distance_mm(const Pose& a, const Pose& b) {
    return (a.translation - b.translation).norm();
}

}  // namespace posegate::testing
