#pragma once

#include "fpm/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace fpm {

enum class PlaneState { Stress, Strain };

struct MaterialModel {
    double E = 1.0;
    double nu = 0.3;
    PlaneState state = PlaneState::Stress;

    double Ebar() const;
    double nubar() const;
};

// 3x3 stress-strain matrix for an isotropic material, Voigt order
// (s11, s22, s12) vs (e11, e22, 2 e12). Rejects nu >= 0.5.
Eigen::Matrix3d elasticity_matrix(const MaterialModel& mat);

// Maps the stacked local DoF vector u_E = [u1_0, u2_0, u1_1, u2_1, ...] to
// the derivative vector a (4 rows linear, 10 rows quadratic: all first
// derivatives of u1, then of u2; quadratic adds d11, d22, d12).
struct RecoveryMatrix {
    Eigen::MatrixXd C;          // (4 or 10) x (2m+2)
    std::vector<int> points;    // [self, supports...] in column order
    int order = 1;

    int n_points() const { return static_cast<int>(points.size()); }
};

// Weighted least-squares derivative recovery at a point from the sampled
// values at its support. Throws RecoveryError when the normal matrix is rank
// deficient (caller may retry with a larger ring).
RecoveryMatrix gfd_recovery(const PointCloud& cloud, const Support& support,
                            int point, int order,
                            const std::vector<double>& weights = {});

// Directional difference along the single remaining neighbor; quadratic rows
// are zero when order == 2.
RecoveryMatrix two_point_fallback(const PointCloud& cloud, int point, int neighbor,
                                  int order);

// Compactly-supported RBF recovery with polynomial augmentation. The kernel
// is (1 - d/r)^3 (1 + 3 d/r) for d <= r.
RecoveryMatrix csrbf_recovery(const PointCloud& cloud, const Support& support,
                              int point, int order, double radius);

double csrbf_kernel(double d, double r);

// Per-point trial shape matrices. N(x) is 2 x (2m+2); B(x) is the strain
// matrix with rows (e11, e22, 2 e12), constant over the subdomain for linear
// trials.
struct ShapeSet {
    int point = -1;
    int order = 1;
    Vec2 x0;
    RecoveryMatrix rec;
    std::vector<int> dofs;      // global DoF ids, two per point in rec.points
    Eigen::MatrixXd B0;         // order-1 constant strain matrix

    int n_dofs() const { return static_cast<int>(dofs.size()); }
    Eigen::MatrixXd N(const Vec2& x) const;
    Eigen::MatrixXd B(const Vec2& x) const;
    // displacement gradient rows: (du1/dx1, du1/dx2, du2/dx1, du2/dx2) x u_E
    Eigen::MatrixXd grad(const Vec2& x) const;
};

ShapeSet shape_matrices(const RecoveryMatrix& rec, const Vec2& point_coords);

enum class RecoveryBackend { Gfd, Csrbf };

struct ApproxConfig {
    RecoveryBackend backend = RecoveryBackend::Gfd;
    int order = 1;
    double csrbf_radius_factor = 1.5;

    int default_rings() const { return order >= 2 ? 2 : 1; }
};

// Support selection + recovery + shape construction for one point, with the
// retry policy: on rank deficiency the ring count is raised once before the
// error propagates. Empty supports yield zero-strain shapes (isolated
// subdomain), single-point supports use the simple difference fallback.
ShapeSet build_point_shapes(const Partition& partition,
                            const std::vector<std::uint8_t>& released,
                            int point, const ApproxConfig& cfg);

} // namespace fpm
