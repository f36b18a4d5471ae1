#pragma once

#include "fpm/assembly.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <vector>

namespace fpm {

enum class SolverKind { Direct, ConjugateGradient };

struct FieldSolution {
    Eigen::VectorXd q;                       // nodal displacements, 2 per point
    std::vector<Eigen::Vector3d> strain;     // per subdomain at its point (e11, e22, 2 e12)
    std::vector<Eigen::Vector3d> stress;     // per subdomain (s11, s22, s12)
    double energy = 0.0;                     // 0.5 q^T K q
};

// Solves the reduced SPD system and scatters prescribed values back in.
// Throws SingularSystemError naming the first non-positive pivot DoF.
Eigen::VectorXd solve_reduced(const ReducedSystem& red, SolverKind kind);

Eigen::VectorXd solve_system(const GlobalSystem& system,
                             SolverKind kind = SolverKind::Direct);

FieldSolution postprocess(const Eigen::VectorXd& q, const std::vector<ShapeSet>& shapes,
                          const Partition& partition, const MaterialModel& material,
                          const GlobalSystem& system);

// Cross-segment average stress at the midpoint of an internal segment.
Eigen::Vector3d segment_stress(const FieldSolution& sol, const Partition& partition,
                               const std::vector<ShapeSet>& shapes,
                               const MaterialModel& material, int segment);

struct ExactField {
    std::function<Vec2(const Vec2&)> displacement;
    std::function<Eigen::Vector3d(const Vec2&)> stress;
};

struct ErrorNorms {
    double r_u = 0.0;
    double r_E = 0.0;
};

// Relative displacement-L2 and energy-norm errors against an exact field,
// integrated cell by cell with the degree-2 polygon rule.
ErrorNorms error_norms(const FieldSolution& sol, const std::vector<ShapeSet>& shapes,
                       const Partition& partition, const MaterialModel& material,
                       const ExactField& exact);

} // namespace fpm
