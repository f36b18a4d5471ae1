#include "fpm/solve.hpp"
#include "fpm/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>

namespace fpm {

Eigen::VectorXd solve_reduced(const ReducedSystem& red, SolverKind kind) {
    const int nf = static_cast<int>(red.free_dofs.size());
    Eigen::VectorXd qf(nf);
    if (nf > 0) {
        if (kind == SolverKind::Direct) {
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(red.K);
            if (ldlt.info() != Eigen::Success)
                throw SingularSystemError("factorization failed (missing constraints?)");
            const Eigen::VectorXd& Dv = ldlt.vectorD();
            for (int i = 0; i < nf; ++i) {
                if (Dv(i) <= 0.0) {
                    const int dof = red.free_dofs[static_cast<std::size_t>(
                        ldlt.permutationPinv().indices()(i))];
                    throw SingularSystemError(
                        "non-positive pivot at dof " + std::to_string(dof) +
                            " (point " + std::to_string(dof / 2) + ", component " +
                            std::to_string(dof % 2) + "); system is not positive definite",
                        dof);
                }
            }
            qf = ldlt.solve(red.Q);
            // iterative refinement recovers the last digits on larger systems
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::VectorXd r = red.Q - red.K * qf;
                if (r.norm() <= 1e-14 * red.Q.norm()) break;
                qf += ldlt.solve(r);
            }
        } else {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                                     Eigen::Lower | Eigen::Upper>
                cg(red.K);
            cg.setTolerance(1e-13);
            cg.setMaxIterations(20 * nf);
            qf = cg.solve(red.Q);
            if (cg.info() != Eigen::Success)
                throw SingularSystemError("conjugate gradient failed to converge");
        }
        const double qnorm = red.Q.norm();
        const double resid = (red.K * qf - red.Q).norm();
        if (qnorm > 0.0 ? resid / qnorm > 1e-10 : resid > 1e-12)
            throw SingularSystemError("solver residual too large: " + std::to_string(resid));
    }

    Eigen::VectorXd q = red.full_values;
    for (int i = 0; i < nf; ++i) q(red.free_dofs[static_cast<std::size_t>(i)]) = qf(i);
    return q;
}

Eigen::VectorXd solve_system(const GlobalSystem& system, SolverKind kind) {
    return solve_reduced(apply_constraints(system), kind);
}

FieldSolution postprocess(const Eigen::VectorXd& q, const std::vector<ShapeSet>& shapes,
                          const Partition& partition, const MaterialModel& material,
                          const GlobalSystem& system) {
    const Eigen::Matrix3d D = elasticity_matrix(material);
    FieldSolution sol;
    sol.q = q;
    const int n = partition.n_points();
    sol.strain.resize(static_cast<std::size_t>(n));
    sol.stress.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        const ShapeSet& s = shapes[static_cast<std::size_t>(p)];
        Eigen::VectorXd ue(s.n_dofs());
        for (int i = 0; i < s.n_dofs(); ++i) ue(i) = q(s.dofs[static_cast<std::size_t>(i)]);
        const Eigen::Vector3d eps = s.B(s.x0) * ue;
        sol.strain[static_cast<std::size_t>(p)] = eps;
        sol.stress[static_cast<std::size_t>(p)] = D * eps;
    }
    sol.energy = 0.5 * q.dot(system.K * q);
    return sol;
}

Eigen::Vector3d segment_stress(const FieldSolution& sol, const Partition& partition,
                               const std::vector<ShapeSet>& shapes,
                               const MaterialModel& material, int segment) {
    const auto& seg = partition.internal[static_cast<std::size_t>(segment)];
    const Vec2 mid = 0.5 * (seg.a + seg.b);
    const Eigen::Matrix3d D = elasticity_matrix(material);
    auto side = [&](int p) -> Eigen::Vector3d {
        const ShapeSet& s = shapes[static_cast<std::size_t>(p)];
        if (s.order == 1) return sol.stress[static_cast<std::size_t>(p)];
        Eigen::VectorXd ue(s.n_dofs());
        for (int i = 0; i < s.n_dofs(); ++i) ue(i) = sol.q(s.dofs[static_cast<std::size_t>(i)]);
        return D * (s.B(mid) * ue);
    };
    return 0.5 * (side(seg.left) + side(seg.right));
}

ErrorNorms error_norms(const FieldSolution& sol, const std::vector<ShapeSet>& shapes,
                       const Partition& partition, const MaterialModel& material,
                       const ExactField& exact) {
    const Eigen::Matrix3d D = elasticity_matrix(material);
    const Eigen::Matrix3d Dinv = D.inverse();
    double num_u = 0.0, den_u = 0.0, num_e = 0.0, den_e = 0.0;
    for (int p = 0; p < partition.n_points(); ++p) {
        const ShapeSet& s = shapes[static_cast<std::size_t>(p)];
        Eigen::VectorXd ue(s.n_dofs());
        for (int i = 0; i < s.n_dofs(); ++i) ue(i) = sol.q(s.dofs[static_cast<std::size_t>(i)]);
        for (const auto& qp : polygon_rule(partition.cells[static_cast<std::size_t>(p)], 2)) {
            const Vec2 uh = s.N(qp.x) * ue;
            const Vec2 uex = exact.displacement(qp.x);
            num_u += qp.w * (uh - uex).squaredNorm();
            den_u += qp.w * uex.squaredNorm();
            const Eigen::Vector3d eh = s.B(qp.x) * ue;
            const Eigen::Vector3d eex = Dinv * exact.stress(qp.x);
            const Eigen::Vector3d de = eh - eex;
            num_e += 0.5 * qp.w * de.dot(D * de);
            den_e += 0.5 * qp.w * eex.dot(D * eex);
        }
    }
    if (den_u <= 0.0 || den_e <= 0.0)
        throw Error("error_norms: exact field has zero norm");
    return {std::sqrt(num_u / den_u), std::sqrt(num_e / den_e)};
}

} // namespace fpm
