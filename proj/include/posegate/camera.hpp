#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "posegate/errors.hpp"
#include "posegate/rng.hpp"
#include "posegate/se3.hpp"

namespace posegate {

// Minimum depth for a point to count as in front of the camera.
inline constexpr double kMinDepthMm = 1e-6;

/// Pinhole intrinsics, pixels. No lens distortion.
struct Intrinsics {
    double fx = 800.0;
    double fy = 800.0;
    double cx = 320.0;
    double cy = 320.0;
};

inline void validate_intrinsics(const Intrinsics& k) {
    if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
        throw InvalidParameterError("intrinsics: focal lengths must be positive");
    }
}

/// Known 3D feature points, mm, expressed in the target frame.
struct TargetModel {
    std::vector<Eigen::Vector3d> points;

    std::size_t size() const { return points.size(); }
};

/// Observed pixel coordinates, index-matched to a TargetModel.
struct PixelObservations {
    std::vector<Eigen::Vector2d> pixels;

    std::size_t size() const { return pixels.size(); }
};

/// 8 vertices of a 100 x 100 x 40 mm box centered at the target-frame
/// origin. Non-planar, diameter ~147 mm. Vertex order: z, y, x sign bits.
inline TargetModel default_box_target() {
    TargetModel t;
    for (int zi : {-1, 1}) {
        for (int yi : {-1, 1}) {
            for (int xi : {-1, 1}) {
                t.points.emplace_back(50.0 * xi, 50.0 * yi, 20.0 * zi);
            }
        }
    }
    return t;
}

/// N >= 4 and not all collinear (rank of the centered point matrix >= 2).
inline void validate_target_model(const TargetModel& t) {
    if (t.size() < 4) {
        throw InsufficientPointsError("target model needs at least 4 points");
    }
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : t.points) centroid += p;
    centroid /= static_cast<double>(t.size());

    Eigen::MatrixXd centered(t.size(), 3);
    for (std::size_t i = 0; i < t.size(); ++i) {
        centered.row(i) = (t.points[i] - centroid).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const auto& s = svd.singularValues();
    if (s(1) <= 1e-9 * std::max(s(0), 1.0)) {
        throw DegenerateConfigurationError("target model points are collinear");
    }
}

/// Plain-text target format: one point per line, three mm coordinates,
/// '#' starts a comment, blank lines ignored.
inline TargetModel load_target_model(std::istream& in) {
    TargetModel t;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x)) continue;  // blank or comment-only line
        if (!(ls >> y >> z)) {
            throw InvalidInputError("target model line " + std::to_string(line_no) +
                                    ": expected three coordinates");
        }
        double extra;
        if (ls >> extra) {
            throw InvalidInputError("target model line " + std::to_string(line_no) +
                                    ": more than three coordinates");
        }
        t.points.emplace_back(x, y, z);
    }
    validate_target_model(t);
    return t;
}

inline TargetModel load_target_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInputError("cannot open target model file: " + path);
    }
    return load_target_model(in);
}

/// Pinhole projection of every target point under cam_from_target.
/// Throws BehindCameraError naming the first point with depth <= 1e-6 mm.
inline PixelObservations project(const Intrinsics& k, const Pose& cam_from_target,
                                 const TargetModel& target) {
    PixelObservations obs;
    obs.pixels.reserve(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        const Eigen::Vector3d pc = transform_point(cam_from_target, target.points[i]);
        if (!(pc.z() > kMinDepthMm)) {
            throw BehindCameraError(i, pc.z());
        }
        obs.pixels.emplace_back(k.fx * pc.x() / pc.z() + k.cx, k.fy * pc.y() / pc.z() + k.cy);
    }
    return obs;
}

/// Mean Euclidean pixel distance between matched observations:
/// (1/N) * sum_i ||p_i - q_i||.
inline double reprojection_error(const PixelObservations& observed,
                                 const PixelObservations& reprojected) {
    if (observed.size() != reprojected.size()) {
        throw InvalidInputError("reprojection_error: length mismatch");
    }
    if (observed.size() == 0) {
        throw InvalidInputError("reprojection_error: empty observations");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        sum += (observed.pixels[i] - reprojected.pixels[i]).norm();
    }
    return sum / static_cast<double>(observed.size());
}

/// Perturbs each pixel coordinate with an independent zero-mean Gaussian of
/// standard deviation sigma. Draw order: per point, x then y.
inline PixelObservations add_pixel_noise(const PixelObservations& obs, double sigma, Rng& rng) {
    if (sigma < 0.0) {
        throw InvalidParameterError("add_pixel_noise: sigma must be >= 0");
    }
    if (sigma == 0.0) {
        return obs;
    }
    PixelObservations noisy;
    noisy.pixels.reserve(obs.size());
    for (const auto& p : obs.pixels) {
        const double nx = sigma * rng.gaussian();
        const double ny = sigma * rng.gaussian();
        noisy.pixels.emplace_back(p.x() + nx, p.y() + ny);
    }
    return noisy;
}

}  // namespace posegate
