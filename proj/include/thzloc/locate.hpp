#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace thzloc::locate {

using Point3 = Eigen::Vector3d;

class DegenerateGeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Controllers with known positions.
///
/// Anchors must be distinct and not collinear; otherwise construction throws
/// DegenerateGeometryError. When they are coplanar the
/// solver can only see the distance to the plane, so the estimate is placed
/// on the side the plane normal points to. The normal is oriented towards +z
/// (falling back to +y, then +x for planes containing the z axis).
class AnchorSet {
public:
    explicit AnchorSet(std::vector<Point3> positions);

    std::span<const Point3> positions() const { return positions_; }
    std::size_t size() const { return positions_.size(); }
    bool coplanar() const { return coplanar_; }
    /// Unit normal of the anchor plane; meaningful only when coplanar().
    const Point3& plane_normal() const { return normal_; }
    /// Orthonormal solver frame, columns (u, v, w). For coplanar anchors u and
    /// v span the anchor plane and w is the oriented normal; otherwise it is
    /// the identity.
    const Eigen::Matrix3d& frame() const { return frame_; }
    /// Anchor positions relative to the first anchor, expressed in frame().
    std::span<const Point3> local_positions() const { return local_; }

    /// Least-squares solve operator of the linearized system: maps the
    /// right-hand side (one row per anchor after the first) to the unknown
    /// local coordinates (in-plane only when coplanar).
    const Eigen::MatrixXd& solve_operator() const { return solve_operator_; }

private:
    std::vector<Point3> positions_;
    std::vector<Point3> local_;
    bool coplanar_ = false;
    Point3 normal_ = Point3::UnitZ();
    Eigen::Matrix3d frame_ = Eigen::Matrix3d::Identity();
    Eigen::MatrixXd solve_operator_;
};

struct LocationEstimate {
    Point3 position_m;
    double residual_m;  // RMS of |p - anchor_i| - d_i
};

struct SolverOptions {
    bool refine = true;
    int max_iterations = 20;
    double step_tolerance_m = 1e-9;
};

/// Linearized least-squares trilateration, optionally followed by
/// Gauss-Newton refinement on the range residuals. Negative ranges are
/// clamped to zero. Throws std::invalid_argument on a size mismatch or a
/// non-finite distance. Rank-deficient geometry is rejected earlier, when the
/// AnchorSet is built.
LocationEstimate trilaterate(const AnchorSet& anchors, std::span<const double> distances_m,
                             const SolverOptions& options = {});

double localization_error(const Point3& truth, const Point3& estimate);

}  // namespace thzloc::locate
