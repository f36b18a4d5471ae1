#include "fpm/model.hpp"
#include "fpm/errors.hpp"

#include <cmath>

namespace fpm {

std::vector<int> segments_on_crack(const Partition& partition,
                                   const std::array<Vec2, 2>& piece) {
    const Vec2& c0 = piece[0];
    const Vec2& c1 = piece[1];
    const Vec2 d = c1 - c0;
    const double len = d.norm();
    if (len <= 0.0) throw GeometryError("zero-length crack piece");
    const Vec2 nrm(-d.y() / len, d.x() / len);
    const double eps = 1e-12 * partition.diameter;

    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(partition.internal.size()); ++s) {
        const auto& seg = partition.internal[static_cast<std::size_t>(s)];
        const Vec2& pl = partition.cloud.pts[static_cast<std::size_t>(seg.left)];
        const Vec2& pr = partition.cloud.pts[static_cast<std::size_t>(seg.right)];
        const double dl = nrm.dot(pl - c0);
        const double dr = nrm.dot(pr - c0);
        if (!((dl > eps && dr < -eps) || (dl < -eps && dr > eps))) continue;
        // crossing parameter along the crack piece
        const Vec2 x = pl + (dl / (dl - dr)) * (pr - pl);
        const double t = d.dot(x - c0) / (len * len);
        if (t >= -1e-12 && t <= 1.0 + 1e-12) out.push_back(s);
    }
    return out;
}

Workspace::Workspace(const Model& m, const ApproxConfig& approx, SolverKind solve_kind)
    : model(&m), cfg(approx), solver(solve_kind) {
    crack.released.assign(m.partition.internal.size(), 0);
    for (const auto& piece : m.precracks)
        for (int s : segments_on_crack(m.partition, piece))
            crack.released[static_cast<std::size_t>(s)] = 1;
    rebuild();
}

void Workspace::rebuild() {
    const Partition& part = partition();
    const int n = part.n_points();
    shapes.resize(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p)
        shapes[static_cast<std::size_t>(p)] = build_point_shapes(part, crack.released, p, cfg);
    system = assemble(part, shapes, model->material, model->eta, crack.released,
                      cfg.order, model->body_force, &cache);
}

std::vector<Constraint> Workspace::constraints_at(double scale) const {
    std::vector<Constraint> cons = derive_constraints(partition(), scale);
    for (const auto& ec : model->extra_constraints) {
        const int dof = 2 * ec.point + ec.comp;
        bool merged = false;
        for (auto& c : cons) {
            if (c.dof == dof) {
                if (std::abs(c.value - scale * ec.value) >
                    1e-9 * std::max(1.0, std::abs(c.value)))
                    throw ConstraintError("conflicting prescriptions on dof " +
                                          std::to_string(dof));
                merged = true;
            }
        }
        if (!merged) cons.push_back({dof, scale * ec.value});
    }
    return cons;
}

FieldSolution Workspace::solve(double scale) {
    system.Q = load_vector(partition(), cache, scale);
    system.constraints = constraints_at(scale);
    const Eigen::VectorXd q = solve_reduced(apply_constraints(system), solver);
    return postprocess(q, shapes, partition(), model->material, system);
}

} // namespace fpm
