#include "thzloc/locate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace thzloc::locate {

namespace {

constexpr double kRankTolerance = 1e-9;

double rms_residual(std::span<const Point3> anchors, std::span<const double> d, const Point3& p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const double r = (p - anchors[i]).norm() - d[i];
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(anchors.size()));
}

// (A^T A)^-1 A^T, or the pseudo-inverse when the normal matrix is not safely
// positive definite.
Eigen::MatrixXd least_squares_operator(const Eigen::MatrixXd& a) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    cod.setThreshold(kRankTolerance);
    if (cod.rank() < a.cols()) {
        throw DegenerateGeometryError("AnchorSet: rank-deficient linearized system");
    }
    const Eigen::MatrixXd normal = a.transpose() * a;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd op = llt.solve(a.transpose());
        if (op.allFinite()) return op;
    }
    return cod.pseudoInverse();
}

}  // namespace

AnchorSet::AnchorSet(std::vector<Point3> positions) : positions_(std::move(positions)) {
    if (positions_.size() < 4) {
        throw std::invalid_argument("AnchorSet: at least four anchors are required");
    }
    for (const auto& p : positions_) {
        if (!p.allFinite()) throw std::invalid_argument("AnchorSet: non-finite anchor position");
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        for (std::size_t j = i + 1; j < positions_.size(); ++j) {
            scale = std::max(scale, (positions_[i] - positions_[j]).norm());
        }
    }
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        for (std::size_t j = i + 1; j < positions_.size(); ++j) {
            if (scale == 0.0 || (positions_[i] - positions_[j]).norm() <= kRankTolerance * scale) {
                throw DegenerateGeometryError("AnchorSet: coincident anchors");
            }
        }
    }

    const auto rows = static_cast<Eigen::Index>(positions_.size() - 1);
    Eigen::MatrixXd offsets(rows, 3);
    for (Eigen::Index i = 0; i < rows; ++i) {
        offsets.row(i) = (positions_[static_cast<std::size_t>(i + 1)] - positions_[0]).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(offsets, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(1) <= kRankTolerance * sv(0)) {
        throw DegenerateGeometryError("AnchorSet: anchors are collinear");
    }
    coplanar_ = sv(2) <= kRankTolerance * sv(0);
    if (coplanar_) {
        Point3 n = svd.matrixV().col(2).normalized();
        const double tie = kRankTolerance;
        const bool flip = n.z() < -tie ||
                          (std::abs(n.z()) <= tie && (n.y() < -tie || (std::abs(n.y()) <= tie && n.x() < 0.0)));
        if (flip) n = -n;
        if (n.z() >= 1.0 - 1e-15) {
            frame_.setIdentity();
        } else {
            const Point3 u = (offsets.row(0).transpose() - offsets.row(0).dot(n) * n).normalized();
            frame_.col(0) = u;
            frame_.col(1) = n.cross(u);
            frame_.col(2) = n;
        }
        normal_ = frame_.col(2);
    }

    local_.reserve(positions_.size());
    for (const auto& p : positions_) {
        Point3 q = frame_.transpose() * (p - positions_[0]);
        if (coplanar_) q.z() = 0.0;
        local_.push_back(q);
    }
    const Eigen::Index unknowns = coplanar_ ? 2 : 3;
    Eigen::MatrixXd a(rows, unknowns);
    for (Eigen::Index i = 0; i < rows; ++i) {
        a.row(i) = local_[static_cast<std::size_t>(i + 1)].head(unknowns).transpose();
    }
    solve_operator_ = least_squares_operator(a);
}

namespace {

// Gauss-Newton on the range residuals in the anchors' local frame, halving
// steps that would increase the residual. A vanishing out-of-plane Jacobian
// column (node on the anchor plane) restricts the step to the plane.
Point3 refine(std::span<const Point3> anchors, std::span<const double> d, Point3 x,
              const SolverOptions& options) {
    double cost = rms_residual(anchors, d, x);
    for (int it = 0; it < options.max_iterations; ++it) {
        Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
        Point3 jtr = Point3::Zero();
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const Point3 diff = x - anchors[i];
            const double r = diff.norm();
            if (r == 0.0) continue;
            const Point3 g = diff / r;
            jtj.noalias() += g * g.transpose();
            jtr += g * (r - d[i]);
        }
        Point3 step = Point3::Zero();
        if (jtj(2, 2) <= 1e-12 * jtj.trace()) {
            Eigen::LDLT<Eigen::Matrix2d> ldlt(jtj.topLeftCorner<2, 2>());
            if (ldlt.info() != Eigen::Success) break;
            step.head<2>() = ldlt.solve(-jtr.head<2>());
        } else {
            Eigen::LDLT<Eigen::Matrix3d> ldlt(jtj);
            if (ldlt.info() != Eigen::Success) break;
            step = ldlt.solve(-jtr);
        }
        if (!step.allFinite()) break;

        double scale = 1.0;
        bool accepted = false;
        Point3 candidate;
        double candidate_cost = cost;
        for (int k = 0; k < 30; ++k, scale *= 0.5) {
            candidate = x + scale * step;
            candidate_cost = rms_residual(anchors, d, candidate);
            if (candidate_cost <= cost) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double moved = (candidate - x).norm();
        x = candidate;
        cost = candidate_cost;
        if (moved < options.step_tolerance_m) break;
    }
    return x;
}

}  // namespace

LocationEstimate trilaterate(const AnchorSet& anchors, std::span<const double> distances_m,
                             const SolverOptions& options) {
    const auto local = anchors.local_positions();
    const std::size_t n = local.size();
    if (distances_m.size() != n) {
        throw std::invalid_argument("trilaterate: one distance per anchor is required");
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(distances_m[i])) {
            throw std::invalid_argument("trilaterate: non-finite distance");
        }
        d[i] = std::max(0.0, distances_m[i]);
    }

    // Subtracting the first sphere from the others gives, with q_i the local
    // anchor coordinates (q_0 = 0):  q_i . x = (|q_i|^2 - d_i^2 + d_0^2) / 2.
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
        rhs(static_cast<Eigen::Index>(i - 1)) = 0.5 * (local[i].squaredNorm() - d[i] * d[i] + d[0] * d[0]);
    }
    const Eigen::VectorXd solution = anchors.solve_operator() * rhs;

    Point3 x;
    if (anchors.coplanar()) {
        x = Point3(solution(0), solution(1), 0.0);
        double h2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            h2 += d[i] * d[i] - (x - local[i]).squaredNorm();
        }
        h2 /= static_cast<double>(n);
        x.z() = std::sqrt(std::max(0.0, h2));
    } else {
        x = solution;
    }

    if (options.refine) {
        x = refine(local, d, x, options);
    }
    // Residuals are even in the out-of-plane coordinate, so the mirror image
    // fits equally well.
    if (anchors.coplanar()) x.z() = std::abs(x.z());

    const double residual = rms_residual(local, d, x);
    return {anchors.positions()[0] + anchors.frame() * x, residual};
}

double localization_error(const Point3& truth, const Point3& estimate) {
    return (truth - estimate).norm();
}

}  // namespace thzloc::locate
