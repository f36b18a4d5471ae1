#include "fpm/assembly.hpp"
#include "fpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <unordered_map>

namespace fpm {

std::vector<QuadPoint> segment_rule(const Vec2& a, const Vec2& b, int npts) {
    const double L = (b - a).norm();
    std::vector<QuadPoint> pts;
    if (npts <= 1) {
        pts.push_back({0.5 * (a + b), L});
    } else {
        const double off = 0.5 / std::sqrt(3.0);
        for (double t : {0.5 - off, 0.5 + off})
            pts.push_back({a + t * (b - a), 0.5 * L});
    }
    return pts;
}

std::vector<QuadPoint> polygon_rule(const Polygon& poly, int order) {
    std::vector<QuadPoint> pts;
    if (order <= 1) {
        pts.push_back({polygon_centroid(poly), polygon_area(poly)});
        return pts;
    }
    const Vec2 c = polygon_centroid(poly);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double area = 0.5 * ((p.x() - c.x()) * (q.y() - c.y()) -
                                   (q.x() - c.x()) * (p.y() - c.y()));
        // signed fan triangles keep the rule exact on non-convex cells; the
        // interior degree-2 point set avoids sampling on cell boundaries
        const double w = area / 3.0;
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        pts.push_back({a * c + b * p + b * q, w});
        pts.push_back({b * c + a * p + b * q, w});
        pts.push_back({b * c + b * p + a * q, w});
    }
    return pts;
}

int segment_points_for_order(int order) { return order >= 2 ? 2 : 1; }

LocalMatrix point_stiffness(const ShapeSet& shapes, const Eigen::Matrix3d& D,
                            const Polygon& cell, int order) {
    LocalMatrix out;
    out.dofs = shapes.dofs;
    const int nd = shapes.n_dofs();
    out.K = Eigen::MatrixXd::Zero(nd, nd);
    if (order == 1) {
        out.K = shapes.B0.transpose() * D * shapes.B0 * polygon_area(cell);
        return out;
    }
    for (const auto& qp : polygon_rule(cell, order)) {
        const Eigen::MatrixXd B = shapes.B(qp.x);
        out.K += qp.w * (B.transpose() * D * B);
    }
    return out;
}

namespace {

// union DoF list + per-side column maps
struct UnionDofs {
    std::vector<int> dofs;
    std::vector<int> map_left, map_right;
};

UnionDofs union_dofs(const ShapeSet& left, const ShapeSet& right) {
    UnionDofs u;
    u.dofs = left.dofs;
    std::unordered_map<int, int> pos;
    pos.reserve(left.dofs.size() + right.dofs.size());
    for (int i = 0; i < static_cast<int>(left.dofs.size()); ++i)
        pos[left.dofs[static_cast<std::size_t>(i)]] = i;
    u.map_left.resize(left.dofs.size());
    for (int i = 0; i < static_cast<int>(left.dofs.size()); ++i) u.map_left[static_cast<std::size_t>(i)] = i;
    u.map_right.resize(right.dofs.size());
    for (int i = 0; i < static_cast<int>(right.dofs.size()); ++i) {
        const int d = right.dofs[static_cast<std::size_t>(i)];
        auto it = pos.find(d);
        if (it == pos.end()) {
            const int idx = static_cast<int>(u.dofs.size());
            u.dofs.push_back(d);
            pos[d] = idx;
            u.map_right[static_cast<std::size_t>(i)] = idx;
        } else {
            u.map_right[static_cast<std::size_t>(i)] = it->second;
        }
    }
    return u;
}

Eigen::MatrixXd pad_cols(const Eigen::MatrixXd& M, const std::vector<int>& map, int ncols) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(M.rows(), ncols);
    for (int c = 0; c < static_cast<int>(map.size()); ++c)
        out.col(map[static_cast<std::size_t>(c)]) += M.col(c);
    return out;
}

} // namespace

LocalMatrix boundary_stiffness(const InternalSegment& seg, const ShapeSet& left,
                               const ShapeSet& right, const Eigen::Matrix3d& D,
                               double eta, int order) {
    if (seg.length <= 0.0) throw GeometryError("boundary_stiffness: zero-length segment");

    const UnionDofs u = union_dofs(left, right);
    const int nd = static_cast<int>(u.dofs.size());
    LocalMatrix out;
    out.dofs = u.dofs;
    out.K = Eigen::MatrixXd::Zero(nd, nd);

    Eigen::Matrix<double, 2, 3> ne;
    ne << seg.normal.x(), 0.0, seg.normal.y(),
          0.0, seg.normal.y(), seg.normal.x();

    for (const auto& qp : segment_rule(seg.a, seg.b, segment_points_for_order(order))) {
        const Eigen::MatrixXd J =
            pad_cols(left.N(qp.x), u.map_left, nd) - pad_cols(right.N(qp.x), u.map_right, nd);
        const Eigen::MatrixXd Bavg =
            0.5 * (pad_cols(left.B(qp.x), u.map_left, nd) + pad_cols(right.B(qp.x), u.map_right, nd));
        const Eigen::MatrixXd F = ne * D * Bavg;   // 2 x nd average flux rows
        out.K += qp.w * (eta / seg.length * (J.transpose() * J) -
                         J.transpose() * F - F.transpose() * J);
    }
    return out;
}

void scatter_add(Eigen::SparseMatrix<double>& K, const LocalMatrix& local, double sign) {
    const int nd = static_cast<int>(local.dofs.size());
    for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
            const double v = sign * local.K(i, j);
            if (v != 0.0)
                K.coeffRef(local.dofs[static_cast<std::size_t>(i)], local.dofs[static_cast<std::size_t>(j)]) += v;
        }
}

LocalVector point_loads(const Partition& partition, const ShapeSet& shapes, int point,
                        const Vec2& body_force, int order) {
    LocalVector out;
    out.dofs = shapes.dofs;
    out.v = Eigen::VectorXd::Zero(shapes.n_dofs());

    if (body_force.squaredNorm() > 0.0) {
        for (const auto& qp : polygon_rule(partition.cells[static_cast<std::size_t>(point)], order))
            out.v += qp.w * (shapes.N(qp.x).transpose() * body_force);
    }
    for (int es : partition.cell_external[static_cast<std::size_t>(point)]) {
        const auto& seg = partition.external[static_cast<std::size_t>(es)];
        if (seg.bc < 0) continue;
        const auto& bc = partition.bcs[static_cast<std::size_t>(seg.bc)];
        if (bc.kind != BcKind::Traction) continue;
        // traction data may vary along the segment; 2-point Gauss keeps the
        // consistent load exact for up to cubic N^T t
        for (const auto& qp : segment_rule(seg.a, seg.b, 2))
            out.v += qp.w * (shapes.N(qp.x).transpose() * bc.value(qp.x));
    }
    return out;
}

Eigen::VectorXd load_vector(const Partition& partition, const AssemblyCache& cache,
                            double scale) {
    Eigen::VectorXd Q = Eigen::VectorXd::Zero(2 * partition.n_points());
    for (const auto& block : cache.load_blocks)
        for (int i = 0; i < static_cast<int>(block.dofs.size()); ++i)
            Q(block.dofs[static_cast<std::size_t>(i)]) += scale * block.v(i);
    return Q;
}

std::vector<Constraint> derive_constraints(const Partition& partition, double scale) {
    const double tol = 1e-9 * partition.diameter;
    std::unordered_map<int, double> values;
    for (const auto& seg : partition.external) {
        if (seg.bc < 0) continue;
        const auto& bc = partition.bcs[static_cast<std::size_t>(seg.bc)];
        if (bc.kind != BcKind::Displacement) continue;
        const Vec2& p = partition.cloud.pts[static_cast<std::size_t>(seg.cell)];
        if (point_segment_distance(p, seg.a, seg.b) > tol) continue;
        const Vec2 u = scale * bc.value(p);
        for (int c = 0; c < 2; ++c) {
            if (!bc.mask[static_cast<std::size_t>(c)]) continue;
            const int dof = 2 * seg.cell + c;
            auto it = values.find(dof);
            const double ref = std::max(1.0, std::abs(u(c)));
            if (it != values.end() && std::abs(it->second - u(c)) > 1e-9 * ref)
                throw ConstraintError("conflicting prescriptions on dof " + std::to_string(dof));
            values[dof] = u(c);
        }
    }
    std::vector<Constraint> out;
    out.reserve(values.size());
    for (const auto& [dof, v] : values) out.push_back({dof, v});
    std::sort(out.begin(), out.end(), [](const Constraint& a, const Constraint& b) {
        return a.dof < b.dof;
    });
    return out;
}

GlobalSystem assemble(const Partition& partition, const std::vector<ShapeSet>& shapes,
                      const MaterialModel& material, double eta,
                      const std::vector<std::uint8_t>& released, int order,
                      const Vec2& body_force, AssemblyCache* cache) {
    if (eta <= 0.0) throw Error("assemble: penalty parameter must be positive");
    if (eta < 1e-2 * material.E || eta > 1e2 * material.E)
        std::cerr << "[fpm] warning: eta = " << eta << " outside [1e-2 E, 1e2 E]\n";

    const Eigen::Matrix3d D = elasticity_matrix(material);
    const int n = partition.n_points();

    GlobalSystem sys;
    sys.n_points = n;
    sys.eta = eta;
    sys.K.resize(2 * n, 2 * n);

    AssemblyCache local_cache;
    AssemblyCache& c = cache ? *cache : local_cache;
    c.point_blocks.assign(static_cast<std::size_t>(n), {});
    c.segment_blocks.assign(partition.internal.size(), {});
    c.load_blocks.assign(static_cast<std::size_t>(n), {});

    std::vector<Eigen::Triplet<double>> trips;
    auto add_local = [&trips](const LocalMatrix& lm) {
        for (int i = 0; i < static_cast<int>(lm.dofs.size()); ++i)
            for (int j = 0; j < static_cast<int>(lm.dofs.size()); ++j)
                trips.emplace_back(lm.dofs[static_cast<std::size_t>(i)],
                                   lm.dofs[static_cast<std::size_t>(j)], lm.K(i, j));
    };

    for (int p = 0; p < n; ++p) {
        c.point_blocks[static_cast<std::size_t>(p)] =
            point_stiffness(shapes[static_cast<std::size_t>(p)], D,
                            partition.cells[static_cast<std::size_t>(p)], order);
        add_local(c.point_blocks[static_cast<std::size_t>(p)]);
        c.load_blocks[static_cast<std::size_t>(p)] =
            point_loads(partition, shapes[static_cast<std::size_t>(p)], p, body_force, order);
    }
    for (int s = 0; s < static_cast<int>(partition.internal.size()); ++s) {
        if (!released.empty() && released[static_cast<std::size_t>(s)]) continue;
        const auto& seg = partition.internal[static_cast<std::size_t>(s)];
        c.segment_blocks[static_cast<std::size_t>(s)] =
            boundary_stiffness(seg, shapes[static_cast<std::size_t>(seg.left)],
                               shapes[static_cast<std::size_t>(seg.right)], D, eta, order);
        add_local(c.segment_blocks[static_cast<std::size_t>(s)]);
    }

    sys.K.setFromTriplets(trips.begin(), trips.end());
    sys.Q = load_vector(partition, c, 1.0);
    sys.constraints = derive_constraints(partition, 1.0);
    return sys;
}

ReducedSystem apply_constraints(const GlobalSystem& system) {
    const int n = static_cast<int>(system.K.rows());
    ReducedSystem red;
    red.is_constrained.assign(static_cast<std::size_t>(n), 0);
    red.full_values = Eigen::VectorXd::Zero(n);
    for (const auto& c : system.constraints) {
        if (c.dof < 0 || c.dof >= n) throw ConstraintError("constraint dof out of range");
        if (red.is_constrained[static_cast<std::size_t>(c.dof)] &&
            std::abs(red.full_values(c.dof) - c.value) >
                1e-9 * std::max(1.0, std::abs(c.value)))
            throw ConstraintError("conflicting prescriptions on dof " + std::to_string(c.dof));
        red.is_constrained[static_cast<std::size_t>(c.dof)] = 1;
        red.full_values(c.dof) = c.value;
    }

    std::vector<int> full_to_red(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!red.is_constrained[static_cast<std::size_t>(i)]) {
            full_to_red[static_cast<std::size_t>(i)] = static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    }
    const int nf = static_cast<int>(red.free_dofs.size());

    red.Q = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < nf; ++i) red.Q(i) = system.Q(red.free_dofs[static_cast<std::size_t>(i)]);

    std::vector<Eigen::Triplet<double>> trips;
    for (int col = 0; col < n; ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.K, col); it; ++it) {
            const int row = static_cast<int>(it.row());
            const int rr = full_to_red[static_cast<std::size_t>(row)];
            const int rc = full_to_red[static_cast<std::size_t>(col)];
            if (rr >= 0 && rc >= 0) {
                trips.emplace_back(rr, rc, it.value());
            } else if (rr >= 0 && rc < 0) {
                red.Q(rr) -= it.value() * red.full_values(col);
            }
        }
    }
    red.K.resize(nf, nf);
    red.K.setFromTriplets(trips.begin(), trips.end());
    return red;
}

} // namespace fpm
