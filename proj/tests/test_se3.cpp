#include <catch_amalgamated.hpp>

#include "posegate/se3.hpp"
#include "test_helpers.hpp"

using namespace posegate;
using namespace posegate::testing;

namespace {
const double kHalfPi = 0.5 * kPi;
}

TEST_CASE("compose with identity is a no-op", "[se3]") {
    Rng rng(101);
    const Pose p = random_pose(rng);
    const Pose left = compose(p, Pose::identity());
    const Pose right = compose(Pose::identity(), p);
    CHECK(rotation_distance_rad(left.rotation, p.rotation) < 1e-12);
    CHECK(translation_distance_mm(left, p) < 1e-9);
    CHECK(rotation_distance_rad(right.rotation, p.rotation) < 1e-12);
    CHECK(translation_distance_mm(right, p) < 1e-9);
}

TEST_CASE("compose matches the 4x4 matrix-product oracle", "[se3]") {
    const Pose a{Rotation::about_z(kHalfPi), Eigen::Vector3d(1.0, 0.0, 0.0)};
    const Pose b{Rotation::about_z(kHalfPi), Eigen::Vector3d::Zero()};
    const Pose c = compose(a, b);

    // Frozen expected value: Rz(90) * Rz(90) = Rz(180), translation unchanged.
    CHECK(rotation_distance_rad(c.rotation, Rotation::about_z(kPi)) < 1e-12);
    CHECK((c.translation - Eigen::Vector3d(1.0, 0.0, 0.0)).norm() < 1e-12);

    Rng rng(102);
    for (int i = 0; i < 200; ++i) {
        const Pose p = random_pose(rng);
        const Pose q = random_pose(rng);
        const Eigen::Matrix4d expect = homogeneous(p) * homogeneous(q);
        CHECK((homogeneous(compose(p, q)) - expect).norm() < 1e-9);
    }
}

TEST_CASE("inverse matches the matrix-inverse oracle", "[se3]") {
    const Pose inv_id = inverse(Pose::identity());
    CHECK(inv_id.rotation.angle() < 1e-15);
    CHECK(inv_id.translation.norm() < 1e-15);

    const Pose p{Rotation::about_z(kHalfPi), Eigen::Vector3d(1.0, 0.0, 0.0)};
    const Pose pinv = inverse(p);
    CHECK(rotation_distance_rad(pinv.rotation, Rotation::about_z(-kHalfPi)) < 1e-12);
    CHECK((pinv.translation - Eigen::Vector3d(0.0, 1.0, 0.0)).norm() < 1e-12);

    Rng rng(103);
    for (int i = 0; i < 200; ++i) {
        const Pose q = random_pose(rng);
        CHECK((homogeneous(inverse(q)) - homogeneous(q).inverse()).norm() < 1e-9);
        const Pose twice = inverse(inverse(q));
        CHECK(rotation_distance_rad(twice.rotation, q.rotation) < 1e-9);
        CHECK(translation_distance_mm(twice, q) < 1e-6);
    }
}

TEST_CASE("group laws hold on random samples", "[se3]") {
    Rng rng(104);
    for (int i = 0; i < 1000; ++i) {
        const Pose a = random_pose(rng);
        const Pose b = random_pose(rng);
        const Pose c = random_pose(rng);
        const Pose left = compose(compose(a, b), c);
        const Pose right = compose(a, compose(b, c));
        CHECK(rotation_distance_rad(left.rotation, right.rotation) < 1e-9);
        CHECK(translation_distance_mm(left, right) < 1e-6);

        const Pose unit = compose(a, inverse(a));
        CHECK(unit.rotation.angle() < 1e-9);
        CHECK(unit.translation.norm() < 1e-6);
        CHECK(std::abs(a.rotation.quaternion().norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("pose_diff basics", "[se3]") {
    Rng rng(105);
    const Pose p = random_pose(rng);
    const PoseDelta self = pose_diff(p, p);
    CHECK(self.rotation_vector.norm() < 1e-12);
    CHECK(self.translation.norm() < 1e-9);

    const Pose shifted{Rotation::identity(), Eigen::Vector3d(10.0, 0.0, 0.0)};
    const PoseDelta d = pose_diff(shifted, Pose::identity());
    CHECK(d.rotation_vector.norm() < 1e-15);
    CHECK((d.translation - Eigen::Vector3d(10.0, 0.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("pose_diff / apply_delta roundtrip on 1000 random pairs", "[se3]") {
    Rng rng(106);
    for (int i = 0; i < 1000; ++i) {
        const Pose base = random_pose(rng);
        const PoseDelta d = random_delta(rng);  // relative angle <= 3 < pi
        const Pose target = apply_delta(base, d);

        const PoseDelta recovered = pose_diff(target, base);
        CHECK((recovered.rotation_vector - d.rotation_vector).norm() < 1e-9);
        CHECK((recovered.translation - d.translation).norm() < 1e-6);

        const Pose rebuilt = apply_delta(base, recovered);
        CHECK(rotation_distance_rad(rebuilt.rotation, target.rotation) < 1e-9);
        CHECK(translation_distance_mm(rebuilt, target) < 1e-6);
    }
}

TEST_CASE("apply_delta basics", "[se3]") {
    Rng rng(107);
    const Pose p = random_pose(rng);
    const Pose same = apply_delta(p, PoseDelta::zero());
    CHECK(rotation_distance_rad(same.rotation, p.rotation) < 1e-15);
    CHECK(translation_distance_mm(same, p) < 1e-15);

    const Pose moved = apply_delta(Pose::identity(),
                                   PoseDelta{Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 2, 3)});
    CHECK(moved.rotation.angle() < 1e-15);
    CHECK((moved.translation - Eigen::Vector3d(1, 2, 3)).norm() < 1e-15);
}

TEST_CASE("pose_diff at angle pi raises the ambiguous-axis error", "[se3]") {
    const Pose half_turn{Rotation::about_x(kPi), Eigen::Vector3d::Zero()};
    CHECK_THROWS_AS(pose_diff(half_turn, Pose::identity()), AmbiguousAxisError);
}

TEST_CASE("scale_delta scales geodesically", "[se3]") {
    Rng rng(108);
    const PoseDelta d = random_delta(rng);

    const PoseDelta full = scale_delta(d, 1.0);
    CHECK(full.rotation_vector == d.rotation_vector);
    CHECK(full.translation == d.translation);

    // Half of a 90 degree rotation is 45 degrees about the same axis.
    const PoseDelta quarter{Eigen::Vector3d(kHalfPi, 0, 0), Eigen::Vector3d::Zero()};
    const PoseDelta eighth = scale_delta(quarter, 0.5);
    const Rotation expect = Rotation::about_x(kHalfPi / 2.0);
    CHECK(rotation_distance_rad(exp_rotation(eighth.rotation_vector), expect) < 1e-12);

    const PoseDelta zero = scale_delta(PoseDelta::zero(), 0.3);
    CHECK(zero.rotation_vector.norm() == 0.0);
    CHECK(zero.translation.norm() == 0.0);

    CHECK_THROWS_AS(scale_delta(d, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(scale_delta(d, -0.5), InvalidParameterError);
    CHECK_THROWS_AS(scale_delta(d, 1.5), InvalidParameterError);
}

TEST_CASE("scaling linearity over random deltas", "[se3]") {
    Rng rng(109);
    for (int i = 0; i < 1000; ++i) {
        const PoseDelta d = random_delta(rng);
        const double alpha = rng.uniform(1e-3, 1.0);
        const PoseDelta s = scale_delta(d, alpha);
        CHECK(std::abs(s.rotation_vector.norm() - alpha * d.rotation_vector.norm()) < 1e-12);
        CHECK(std::abs(s.translation.norm() - alpha * d.translation.norm()) < 1e-9);
    }
}

TEST_CASE("scaled delta converges to the base pose as alpha -> 0", "[se3]") {
    Rng rng(110);
    for (int i = 0; i < 100; ++i) {
        const Pose base = random_pose(rng);
        const PoseDelta d = random_delta(rng);
        const Pose nudged = apply_delta(base, scale_delta(d, 1e-8));
        CHECK(translation_distance_mm(nudged, base) < 1e-5);
        CHECK(rotation_distance_rad(nudged.rotation, base.rotation) < 1e-5);
    }
}

TEST_CASE("rotation_angle_deg", "[se3]") {
    Rng rng(111);
    const Rotation r = random_rotation(rng);
    CHECK(rotation_angle_deg(r, r) == 0.0);
    CHECK(std::abs(rotation_angle_deg(Rotation::identity(), Rotation::about_x(30.0 * kRadPerDeg)) -
                   30.0) < 1e-12);

    // Invariant under simultaneous left-multiplication.
    for (int i = 0; i < 200; ++i) {
        const Rotation a = random_rotation(rng);
        const Rotation b = random_rotation(rng);
        const Rotation g = random_rotation(rng);
        const double base = rotation_angle_deg(a, b);
        const double moved = rotation_angle_deg(g * a, g * b);
        CHECK(std::abs(base - moved) < 1e-9);
        CHECK(base >= 0.0);
        CHECK(base <= 180.0);
    }
}

TEST_CASE("exp and log are mutual inverses on the canonical branch", "[se3]") {
    CHECK(exp_rotation(Eigen::Vector3d::Zero()).angle() == 0.0);
    CHECK(log_rotation(Rotation::identity()).norm() == 0.0);

    // Rodrigues-formula oracle for exp.
    Rng rng(112);
    for (int i = 0; i < 200; ++i) {
        const Eigen::Vector3d v = random_unit_vector(rng) * rng.uniform(1e-9, kPi - 1e-6);
        const double theta = v.norm();
        const Eigen::Vector3d axis = v / theta;
        Eigen::Matrix3d k;
        k << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
        const Eigen::Matrix3d rodrigues =
            Eigen::Matrix3d::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
        CHECK((exp_rotation(v).matrix() - rodrigues).norm() < 1e-12);
        CHECK((log_rotation(exp_rotation(v)) - v).norm() < 1e-9);
    }

    const Eigen::Vector3d quarter(kHalfPi, 0.0, 0.0);
    CHECK(rotation_distance_rad(exp_rotation(quarter), Rotation::about_x(kHalfPi)) < 1e-15);

    CHECK_THROWS_AS(log_rotation(Rotation::about_y(kPi)), AmbiguousAxisError);
}
