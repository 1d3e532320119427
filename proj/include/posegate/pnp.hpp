#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "posegate/camera.hpp"
#include "posegate/errors.hpp"
#include "posegate/se3.hpp"

namespace posegate {

/// Matched 3D target points and 2D pixel observations plus the intrinsics
/// they were observed under; the estimator's sole input.
struct Correspondences {
    TargetModel target;
    PixelObservations pixels;
    Intrinsics intrinsics;
};

inline void validate_correspondences(const Correspondences& c) {
    if (c.target.size() != c.pixels.size()) {
        throw InvalidInputError("correspondences: target/pixel length mismatch");
    }
    if (c.target.size() < 4) {
        throw InsufficientPointsError("correspondences: need at least 4 points");
    }
}

/// Per-iteration mean reprojection residuals (px), r_0 ... r_K. Traces
/// produced by refine_gauss_newton are non-increasing.
struct ResidualTrace {
    std::vector<double> residuals;

    std::size_t size() const { return residuals.size(); }
    double final_residual() const { return residuals.back(); }
};

/// Relative residual decrease over the trace: (r_first - r_last) / r_first.
/// Returns 0 when r_first is 0 (already converged at the start).
inline double residual_decrease(const ResidualTrace& t) {
    if (t.size() < 2) {
        throw InsufficientTraceError("residual_decrease: trace needs at least 2 entries");
    }
    const double from = t.residuals.front();
    const double to = t.residuals.back();
    if (from <= 0.0) {
        return 0.0;
    }
    return (from - to) / from;
}

struct PnPEstimate {
    Pose cam_from_target;
    ResidualTrace trace;
};

namespace detail {

inline double mean_residual(const Intrinsics& k, const Pose& pose, const Correspondences& c) {
    return reprojection_error(c.pixels, project(k, pose, c.target));
}

/// Residual of a candidate pose, +inf when any point falls behind the camera.
inline double mean_residual_or_inf(const Intrinsics& k, const Pose& pose,
                                   const Correspondences& c) {
    try {
        return mean_residual(k, pose, c);
    } catch (const BehindCameraError&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return s;
}

// --- EPnP internals (Lepetit / Moreno-Noguer / Fua style solver) ---

struct EpnpWorkspace {
    std::array<Eigen::Vector3d, 4> control_world;
    Eigen::MatrixXd alphas;                       // N x 4 barycentric coordinates
    Eigen::Matrix<double, 12, 4> null_basis;      // 4 smallest eigenvectors of M^T M
    Eigen::Matrix<double, 6, 10> l6x10;
    Eigen::Matrix<double, 6, 1> rho;
};

inline std::array<Eigen::Vector3d, 4> choose_control_points(const TargetModel& target) {
    const std::size_t n = target.size();
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& p : target.points) centroid += p;
    centroid /= static_cast<double>(n);

    Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
    for (const auto& p : target.points) {
        const Eigen::Vector3d d = p - centroid;
        scatter += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(scatter);  // ascending eigenvalues

    std::array<Eigen::Vector3d, 4> c;
    c[0] = centroid;
    for (int j = 0; j < 3; ++j) {
        const double lambda = std::max(es.eigenvalues()(2 - j), 0.0);
        c[j + 1] = centroid + std::sqrt(lambda / static_cast<double>(n)) * es.eigenvectors().col(2 - j);
    }
    return c;
}

inline Eigen::MatrixXd compute_barycentric(const TargetModel& target,
                                           const std::array<Eigen::Vector3d, 4>& control) {
    Eigen::Matrix4d c_mat;
    for (int j = 0; j < 4; ++j) {
        c_mat.block<3, 1>(0, j) = control[j];
        c_mat(3, j) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(c_mat, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (!(s(3) > 0.0) || s(0) / s(3) > 1e12) {
        throw DegenerateConfigurationError(
            "epnp: degenerate control-point system (planar or collinear target)");
    }
    const Eigen::Matrix4d c_inv = c_mat.inverse();

    Eigen::MatrixXd alphas(target.size(), 4);
    for (std::size_t i = 0; i < target.size(); ++i) {
        Eigen::Vector4d homo(target.points[i].x(), target.points[i].y(), target.points[i].z(), 1.0);
        alphas.row(i) = (c_inv * homo).transpose();
    }
    return alphas;
}

inline Eigen::Matrix<double, 12, 4> solve_null_basis(const Correspondences& c,
                                                     const Eigen::MatrixXd& alphas) {
    const std::size_t n = c.target.size();
    const Intrinsics& k = c.intrinsics;
    Eigen::MatrixXd m(2 * n, 12);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = c.pixels.pixels[i].x();
        const double v = c.pixels.pixels[i].y();
        for (int j = 0; j < 4; ++j) {
            const double a = alphas(i, j);
            m(2 * i, 3 * j + 0) = a * k.fx;
            m(2 * i, 3 * j + 1) = 0.0;
            m(2 * i, 3 * j + 2) = a * (k.cx - u);
            m(2 * i + 1, 3 * j + 0) = 0.0;
            m(2 * i + 1, 3 * j + 1) = a * k.fy;
            m(2 * i + 1, 3 * j + 2) = a * (k.cy - v);
        }
    }
    const Eigen::Matrix<double, 12, 12> mtm = m.transpose() * m;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 12, 12>> es(mtm);  // ascending
    Eigen::Matrix<double, 12, 4> basis;
    for (int j = 0; j < 4; ++j) {
        basis.col(j) = es.eigenvectors().col(j);  // col 0 = smallest eigenvalue
    }
    return basis;
}

inline void fill_distance_system(const Eigen::Matrix<double, 12, 4>& basis,
                                 const std::array<Eigen::Vector3d, 4>& control,
                                 Eigen::Matrix<double, 6, 10>* l6x10,
                                 Eigen::Matrix<double, 6, 1>* rho) {
    // Pairwise control-point difference vectors per basis column.
    std::array<std::array<Eigen::Vector3d, 6>, 4> dv;
    int pair = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b, ++pair) {
            for (int k = 0; k < 4; ++k) {
                dv[k][pair] = basis.block<3, 1>(3 * a, k) - basis.block<3, 1>(3 * b, k);
            }
            (*rho)(pair) = (control[a] - control[b]).squaredNorm();
        }
    }
    // Columns follow the quadratic monomial order
    // [b11, b12, b22, b13, b23, b33, b14, b24, b34, b44].
    for (int p = 0; p < 6; ++p) {
        (*l6x10)(p, 0) = dv[0][p].dot(dv[0][p]);
        (*l6x10)(p, 1) = 2.0 * dv[0][p].dot(dv[1][p]);
        (*l6x10)(p, 2) = dv[1][p].dot(dv[1][p]);
        (*l6x10)(p, 3) = 2.0 * dv[0][p].dot(dv[2][p]);
        (*l6x10)(p, 4) = 2.0 * dv[1][p].dot(dv[2][p]);
        (*l6x10)(p, 5) = dv[2][p].dot(dv[2][p]);
        (*l6x10)(p, 6) = 2.0 * dv[0][p].dot(dv[3][p]);
        (*l6x10)(p, 7) = 2.0 * dv[1][p].dot(dv[3][p]);
        (*l6x10)(p, 8) = 2.0 * dv[2][p].dot(dv[3][p]);
        (*l6x10)(p, 9) = dv[3][p].dot(dv[3][p]);
    }
}

inline Eigen::Vector4d betas_approx_1(const Eigen::Matrix<double, 6, 10>& l,
                                      const Eigen::Matrix<double, 6, 1>& rho) {
    // Keep [b11, b12, b13, b14] columns.
    Eigen::Matrix<double, 6, 4> sub;
    sub.col(0) = l.col(0);
    sub.col(1) = l.col(1);
    sub.col(2) = l.col(3);
    sub.col(3) = l.col(6);
    const Eigen::Vector4d x = sub.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d betas;
    if (x(0) < 0.0) {
        betas(0) = std::sqrt(-x(0));
        betas(1) = -x(1) / betas(0);
        betas(2) = -x(2) / betas(0);
        betas(3) = -x(3) / betas(0);
    } else {
        betas(0) = std::sqrt(x(0));
        betas(1) = x(1) / betas(0);
        betas(2) = x(2) / betas(0);
        betas(3) = x(3) / betas(0);
    }
    return betas;
}

inline Eigen::Vector4d betas_approx_2(const Eigen::Matrix<double, 6, 10>& l,
                                      const Eigen::Matrix<double, 6, 1>& rho) {
    // Keep [b11, b12, b22] columns.
    Eigen::Matrix<double, 6, 3> sub;
    sub.col(0) = l.col(0);
    sub.col(1) = l.col(1);
    sub.col(2) = l.col(2);
    const Eigen::Vector3d x = sub.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d betas = Eigen::Vector4d::Zero();
    if (x(0) < 0.0) {
        betas(0) = std::sqrt(-x(0));
        betas(1) = (x(2) < 0.0) ? std::sqrt(-x(2)) : 0.0;
    } else {
        betas(0) = std::sqrt(x(0));
        betas(1) = (x(2) > 0.0) ? std::sqrt(x(2)) : 0.0;
    }
    if (x(1) < 0.0) betas(0) = -betas(0);
    return betas;
}

inline Eigen::Vector4d betas_approx_3(const Eigen::Matrix<double, 6, 10>& l,
                                      const Eigen::Matrix<double, 6, 1>& rho) {
    // Keep [b11, b12, b22, b13, b23] columns.
    Eigen::Matrix<double, 6, 5> sub;
    for (int j = 0; j < 5; ++j) sub.col(j) = l.col(j);
    const Eigen::Matrix<double, 5, 1> x = sub.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d betas = Eigen::Vector4d::Zero();
    if (x(0) < 0.0) {
        betas(0) = std::sqrt(-x(0));
        betas(1) = (x(2) < 0.0) ? std::sqrt(-x(2)) : 0.0;
    } else {
        betas(0) = std::sqrt(x(0));
        betas(1) = (x(2) > 0.0) ? std::sqrt(x(2)) : 0.0;
    }
    if (x(1) < 0.0) betas(0) = -betas(0);
    betas(2) = (betas(0) != 0.0) ? x(3) / betas(0) : 0.0;
    return betas;
}

/// Refines betas against the six control-point distance constraints.
inline Eigen::Vector4d refine_betas(const Eigen::Matrix<double, 6, 10>& l,
                                    const Eigen::Matrix<double, 6, 1>& rho,
                                    Eigen::Vector4d betas) {
    for (int iter = 0; iter < 5; ++iter) {
        Eigen::Matrix<double, 6, 4> jac;
        Eigen::Matrix<double, 6, 1> residual;
        for (int p = 0; p < 6; ++p) {
            const double b1 = betas(0), b2 = betas(1), b3 = betas(2), b4 = betas(3);
            const double f = l(p, 0) * b1 * b1 + l(p, 1) * b1 * b2 + l(p, 2) * b2 * b2 +
                             l(p, 3) * b1 * b3 + l(p, 4) * b2 * b3 + l(p, 5) * b3 * b3 +
                             l(p, 6) * b1 * b4 + l(p, 7) * b2 * b4 + l(p, 8) * b3 * b4 +
                             l(p, 9) * b4 * b4;
            residual(p) = rho(p) - f;
            jac(p, 0) = 2.0 * l(p, 0) * b1 + l(p, 1) * b2 + l(p, 3) * b3 + l(p, 6) * b4;
            jac(p, 1) = l(p, 1) * b1 + 2.0 * l(p, 2) * b2 + l(p, 4) * b3 + l(p, 7) * b4;
            jac(p, 2) = l(p, 3) * b1 + l(p, 4) * b2 + 2.0 * l(p, 5) * b3 + l(p, 8) * b4;
            jac(p, 3) = l(p, 6) * b1 + l(p, 7) * b2 + l(p, 8) * b3 + 2.0 * l(p, 9) * b4;
        }
        const Eigen::Vector4d step = jac.colPivHouseholderQr().solve(residual);
        if (!step.allFinite()) break;
        betas += step;
    }
    return betas;
}

/// Absolute-orientation (Horn) fit mapping world points onto camera points.
inline Pose fit_rigid_transform(const std::vector<Eigen::Vector3d>& world,
                                const std::vector<Eigen::Vector3d>& camera) {
    Eigen::Vector3d cw = Eigen::Vector3d::Zero();
    Eigen::Vector3d cc = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < world.size(); ++i) {
        cw += world[i];
        cc += camera[i];
    }
    cw /= static_cast<double>(world.size());
    cc /= static_cast<double>(world.size());

    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < world.size(); ++i) {
        h += (world[i] - cw) * (camera[i] - cc).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixV() * svd.matrixU().transpose();
    if (r.determinant() < 0.0) {
        Eigen::Matrix3d v = svd.matrixV();
        v.col(2) = -v.col(2);
        r = v * svd.matrixU().transpose();
    }
    const Rotation rotation(r);
    return Pose{rotation, cc - rotation * cw};
}

/// Reconstructs the pose from a beta vector; returns the pose and its mean
/// reprojection residual (inf when the reconstruction is unusable).
inline std::pair<Pose, double> pose_from_betas(const Correspondences& c,
                                               const EpnpWorkspace& ws,
                                               const Eigen::Vector4d& betas) {
    std::array<Eigen::Vector3d, 4> control_cam;
    for (int j = 0; j < 4; ++j) {
        control_cam[j] = Eigen::Vector3d::Zero();
        for (int k = 0; k < 4; ++k) {
            control_cam[j] += betas(k) * ws.null_basis.block<3, 1>(3 * j, k);
        }
    }
    const std::size_t n = c.target.size();
    std::vector<Eigen::Vector3d> cam_points(n);
    double z_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cam_points[i] = Eigen::Vector3d::Zero();
        for (int j = 0; j < 4; ++j) {
            cam_points[i] += ws.alphas(i, j) * control_cam[j];
        }
        z_sum += cam_points[i].z();
    }
    if (z_sum < 0.0) {
        for (auto& p : cam_points) p = -p;
    }
    const Pose pose = fit_rigid_transform(c.target.points, cam_points);
    return {pose, mean_residual_or_inf(c.intrinsics, pose, c)};
}

}  // namespace detail

/// EPnP: camera-from-target pose from N >= 4 correspondences. Noiseless
/// input reproduces the generating pose to machine-precision scale.
inline Pose solve_epnp(const Correspondences& c) {
    validate_correspondences(c);

    detail::EpnpWorkspace ws;
    ws.control_world = detail::choose_control_points(c.target);
    ws.alphas = detail::compute_barycentric(c.target, ws.control_world);
    ws.null_basis = detail::solve_null_basis(c, ws.alphas);
    detail::fill_distance_system(ws.null_basis, ws.control_world, &ws.l6x10, &ws.rho);

    Pose best_pose;
    double best_err = std::numeric_limits<double>::infinity();
    const std::array<Eigen::Vector4d, 3> seeds = {
        detail::betas_approx_1(ws.l6x10, ws.rho),
        detail::betas_approx_2(ws.l6x10, ws.rho),
        detail::betas_approx_3(ws.l6x10, ws.rho),
    };
    for (const auto& seed : seeds) {
        if (!seed.allFinite()) continue;
        const Eigen::Vector4d betas = detail::refine_betas(ws.l6x10, ws.rho, seed);
        const auto [pose, err] = detail::pose_from_betas(c, ws, betas);
        if (err < best_err) {
            best_err = err;
            best_pose = pose;
        }
    }
    if (!std::isfinite(best_err)) {
        throw DegenerateConfigurationError("epnp: no usable solution candidate");
    }
    return best_pose;
}

struct RefineOptions {
    int max_iter = 50;
    double tol_px = 1e-8;  // stop when the residual improvement drops below this
};

/// Stacked reprojection residual (reprojected - observed, 2N) and its
/// analytic Jacobian with respect to a body-frame pose delta
/// [rotation_vector, translation] applied as apply_delta(pose, d).
inline void reprojection_residual_jacobian(const Pose& pose, const Correspondences& c,
                                           Eigen::VectorXd* residual, Eigen::MatrixXd* jacobian) {
    const std::size_t n = c.target.size();
    const Intrinsics& k = c.intrinsics;
    residual->resize(2 * n);
    if (jacobian != nullptr) jacobian->resize(2 * n, 6);

    const Eigen::Matrix3d r = pose.rotation.matrix();
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d& pt = c.target.points[i];
        const Eigen::Vector3d pc = transform_point(pose, pt);
        if (!(pc.z() > kMinDepthMm)) {
            throw BehindCameraError(i, pc.z());
        }
        const double inv_z = 1.0 / pc.z();
        (*residual)(2 * i) = k.fx * pc.x() * inv_z + k.cx - c.pixels.pixels[i].x();
        (*residual)(2 * i + 1) = k.fy * pc.y() * inv_z + k.cy - c.pixels.pixels[i].y();

        if (jacobian != nullptr) {
            Eigen::Matrix<double, 2, 3> d_pix;  // d(pixel)/d(camera point)
            d_pix << k.fx * inv_z, 0.0, -k.fx * pc.x() * inv_z * inv_z,
                     0.0, k.fy * inv_z, -k.fy * pc.y() * inv_z * inv_z;
            Eigen::Matrix<double, 3, 6> d_cam;  // d(camera point)/d(delta)
            d_cam.block<3, 3>(0, 0) = -r * detail::skew(pt);
            d_cam.block<3, 3>(0, 3) = r;
            jacobian->block<2, 6>(2 * i, 0) = d_pix * d_cam;
        }
    }
}

/// Gauss-Newton refinement of the mean reprojection residual over a 6-DoF
/// body-frame pose delta. Each iteration halves the step (up to 10 times)
/// until the residual strictly decreases, so the recorded trace is
/// non-increasing. The trace starts at the residual of the initial pose and
/// gains one entry per accepted iteration. Singular or non-finite updates
/// end the refinement with a stagnant trace entry (delta-r of 0) rather
/// than an exception.
inline PnPEstimate refine_gauss_newton(const Pose& init, const Correspondences& c,
                                       const RefineOptions& opts = {}) {
    validate_correspondences(c);
    Pose pose = init;
    double current = detail::mean_residual(c.intrinsics, pose, c);  // throws if behind camera
    ResidualTrace trace;
    trace.residuals.push_back(current);

    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        reprojection_residual_jacobian(pose, c, &residual, &jacobian);
        const Eigen::Matrix<double, 6, 6> jtj = jacobian.transpose() * jacobian;
        const Eigen::Matrix<double, 6, 1> jtr = jacobian.transpose() * residual;
        const Eigen::Matrix<double, 6, 1> step = jtj.ldlt().solve(-jtr);
        if (!step.allFinite()) {
            trace.residuals.push_back(current);  // stagnant marker
            break;
        }

        double scale = 1.0;
        bool accepted = false;
        Pose candidate;
        double next = current;
        for (int halving = 0; halving <= 10; ++halving) {
            const PoseDelta d{scale * step.head<3>(), scale * step.tail<3>()};
            candidate = apply_delta(pose, d);
            next = detail::mean_residual_or_inf(c.intrinsics, candidate, c);
            if (next < current) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            break;  // no descent direction left at this point
        }
        const double improvement = current - next;
        pose = candidate;
        current = next;
        trace.residuals.push_back(current);
        if (improvement < opts.tol_px) {
            break;
        }
    }
    return PnPEstimate{pose, trace};
}

/// Estimator-agnostic interface: anything that can turn correspondences
/// into a pose plus a residual trace plugs in here. Implementations must be
/// safe to call concurrently from independent trials.
class PoseEstimator {
  public:
    virtual ~PoseEstimator() = default;
    virtual PnPEstimate estimate(const Correspondences& c) const = 0;
    virtual std::string_view name() const = 0;
};

/// Closed-form EPnP only; emits a single-entry trace, which downstream
/// reliability evaluation treats as "no delta-r available".
class EpnpEstimator final : public PoseEstimator {
  public:
    PnPEstimate estimate(const Correspondences& c) const override {
        const Pose pose = solve_epnp(c);
        return PnPEstimate{pose, ResidualTrace{{detail::mean_residual(c.intrinsics, pose, c)}}};
    }
    std::string_view name() const override { return "epnp"; }
};

/// Default pipeline: EPnP initialization followed by Gauss-Newton
/// reprojection refinement.
class EpnpGaussNewtonEstimator final : public PoseEstimator {
  public:
    explicit EpnpGaussNewtonEstimator(RefineOptions opts = {}) : opts_(opts) {}

    PnPEstimate estimate(const Correspondences& c) const override {
        return refine_gauss_newton(solve_epnp(c), c, opts_);
    }
    std::string_view name() const override { return "epnp_gn"; }

  private:
    RefineOptions opts_;
};

}  // namespace posegate
