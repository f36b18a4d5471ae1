#pragma once

#include "fpm/approximation.hpp"
#include "fpm/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <vector>

namespace fpm {

struct QuadPoint {
    Vec2 x;
    double w;
};

// Gauss points on the straight segment a-b; weights sum to its length.
std::vector<QuadPoint> segment_rule(const Vec2& a, const Vec2& b, int npts);

// Polygon rule: order 1 is centroid x area; order >= 2 fans the polygon from
// its centroid into (signed) triangles with a 3-point degree-2 rule each.
// Weights sum to the polygon area.
std::vector<QuadPoint> polygon_rule(const Polygon& poly, int order);

int segment_points_for_order(int order);   // 1 for linear trials, 2 for quadratic

struct LocalMatrix {
    Eigen::MatrixXd K;
    std::vector<int> dofs;
};

struct LocalVector {
    Eigen::VectorXd v;
    std::vector<int> dofs;
};

// K_E = integral over the subdomain of B^T D B.
LocalMatrix point_stiffness(const ShapeSet& shapes, const Eigen::Matrix3d& D,
                            const Polygon& cell, int order);

// The interior-penalty boundary stiffness of one internal segment, on the
// union of the two sides' DoF sets. eta is the penalty coefficient.
LocalMatrix boundary_stiffness(const InternalSegment& seg, const ShapeSet& left,
                               const ShapeSet& right, const Eigen::Matrix3d& D,
                               double eta, int order);

struct Constraint {
    int dof = -1;
    double value = 0.0;
};

struct GlobalSystem {
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd Q;
    int n_points = 0;
    std::vector<Constraint> constraints;
    double eta = 0.0;
};

// Cached local blocks so crack releases can patch K incrementally.
struct AssemblyCache {
    std::vector<LocalMatrix> point_blocks;       // per point
    std::vector<LocalMatrix> segment_blocks;     // per internal segment (empty when released)
    std::vector<LocalVector> load_blocks;        // per point: unit-scale tractions + body force
};

void scatter_add(Eigen::SparseMatrix<double>& K, const LocalMatrix& local, double sign);

// Unit-scale traction/body-force load contributions of one subdomain.
LocalVector point_loads(const Partition& partition, const ShapeSet& shapes, int point,
                        const Vec2& body_force, int order);

// Consistent load vector at a given load scale. Throws when a traction BC
// resolves onto a released segment.
Eigen::VectorXd load_vector(const Partition& partition, const AssemblyCache& cache,
                            double scale);

// Per-point displacement constraints: every point lying on a
// displacement-tagged external segment gets its masked components prescribed.
std::vector<Constraint> derive_constraints(const Partition& partition, double scale);

GlobalSystem assemble(const Partition& partition, const std::vector<ShapeSet>& shapes,
                      const MaterialModel& material, double eta,
                      const std::vector<std::uint8_t>& released, int order,
                      const Vec2& body_force, AssemblyCache* cache = nullptr);

struct ReducedSystem {
    Eigen::SparseMatrix<double> K;
    Eigen::VectorXd Q;
    std::vector<int> free_dofs;          // reduced index -> full dof
    Eigen::VectorXd full_values;         // prescribed values (0 on free dofs)
    std::vector<char> is_constrained;
};

// Symmetric elimination: prescribed values move to the right-hand side and
// the reduced matrix keeps the SPD structure.
ReducedSystem apply_constraints(const GlobalSystem& system);

} // namespace fpm
