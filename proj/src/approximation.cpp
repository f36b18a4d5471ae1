#include "fpm/approximation.hpp"
#include "fpm/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace fpm {

double MaterialModel::Ebar() const {
    return state == PlaneState::Stress ? E : E / (1.0 - nu * nu);
}

double MaterialModel::nubar() const {
    return state == PlaneState::Stress ? nu : nu / (1.0 - nu);
}

Eigen::Matrix3d elasticity_matrix(const MaterialModel& mat) {
    if (mat.E <= 0.0) throw Error("Young's modulus must be positive");
    if (mat.nu < 0.0 || mat.nu >= 0.5)
        throw Error("Poisson ratio must lie in [0, 0.5)");
    const double Eb = mat.Ebar();
    const double nb = mat.nubar();
    Eigen::Matrix3d D;
    D << 1.0, nb, 0.0,
         nb, 1.0, 0.0,
         0.0, 0.0, 0.5 * (1.0 - nb);
    D *= Eb / (1.0 - nb * nb);
    return D;
}

namespace {

int basis_terms(int order) { return order >= 2 ? 5 : 2; }

// Taylor basis row h(x) about x0 (without the constant term), Eq-2.3 layout:
// linear (dx, dy); quadratic adds (dx^2/2, dy^2/2, dx dy).
Eigen::RowVectorXd basis_row(const Vec2& x, const Vec2& x0, int order) {
    const double dx = x.x() - x0.x();
    const double dy = x.y() - x0.y();
    Eigen::RowVectorXd h(basis_terms(order));
    h(0) = dx;
    h(1) = dy;
    if (order >= 2) {
        h(2) = 0.5 * dx * dx;
        h(3) = 0.5 * dy * dy;
        h(4) = dx * dy;
    }
    return h;
}

// Interleave the scalar-component recovery C1 ((nb) x (m+1)) into the full C
// over u_E = [u1_0, u2_0, u1_1, u2_1, ...].
Eigen::MatrixXd interleave(const Eigen::MatrixXd& C1, int order) {
    const int nb = static_cast<int>(C1.rows());
    const int mp1 = static_cast<int>(C1.cols());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * basis_terms(order), 2 * mp1);
    for (int r = 0; r < nb; ++r)
        for (int c = 0; c < mp1; ++c) {
            C(r, 2 * c) = C1(r, c);
            C(nb + r, 2 * c + 1) = C1(r, c);
        }
    // pad zero quadratic rows when the scalar recovery is first order only
    if (order >= 2 && nb < 5) {
        Eigen::MatrixXd Cfull = Eigen::MatrixXd::Zero(10, 2 * mp1);
        Cfull.block(0, 0, nb, 2 * mp1) = C.block(0, 0, nb, 2 * mp1);
        Cfull.block(5, 0, nb, 2 * mp1) = C.block(nb, 0, nb, 2 * mp1);
        return Cfull;
    }
    return C;
}

} // namespace

RecoveryMatrix gfd_recovery(const PointCloud& cloud, const Support& support,
                            int point, int order,
                            const std::vector<double>& weights) {
    const int m = static_cast<int>(support.ids.size());
    if (m == 0)
        throw IsolatedPointError("gfd_recovery: point " + std::to_string(point) +
                                     " has an empty support",
                                 point);
    const int nb = basis_terms(order);
    if (m < nb)
        throw RecoveryError("gfd_recovery: support of point " + std::to_string(point) +
                            " too small (" + std::to_string(m) + " < " +
                            std::to_string(nb) + ")");
    if (!weights.empty() && static_cast<int>(weights.size()) != m)
        throw Error("gfd_recovery: weight count mismatch");

    const Vec2& x0 = cloud.pts[static_cast<std::size_t>(point)];
    Eigen::MatrixXd A(m, nb);
    for (int i = 0; i < m; ++i)
        A.row(i) = basis_row(cloud.pts[static_cast<std::size_t>(support.ids[static_cast<std::size_t>(i)])], x0, order);

    Eigen::VectorXd w = Eigen::VectorXd::Ones(m);
    if (!weights.empty())
        for (int i = 0; i < m; ++i) w(i) = weights[static_cast<std::size_t>(i)];

    const Eigen::MatrixXd AtW = A.transpose() * w.asDiagonal();
    const Eigen::MatrixXd M = AtW * A;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin <= 1e-12 * lmax) {
        const double cond = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
        throw RecoveryError("gfd_recovery: rank-deficient normal matrix at point " +
                                std::to_string(point),
                            cond);
    }

    // C1 = M^-1 A^T W [I1 I2]; column 0 is the point itself
    Eigen::MatrixXd rhs(m, m + 1);
    rhs.col(0) = Eigen::VectorXd::Constant(m, -1.0);
    rhs.block(0, 1, m, m) = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd C1 = M.ldlt().solve(AtW * rhs);

    RecoveryMatrix rec;
    rec.order = order;
    rec.points.push_back(point);
    rec.points.insert(rec.points.end(), support.ids.begin(), support.ids.end());
    rec.C = interleave(C1, order);
    return rec;
}

RecoveryMatrix two_point_fallback(const PointCloud& cloud, int point, int neighbor,
                                  int order) {
    const Vec2& p0 = cloud.pts[static_cast<std::size_t>(point)];
    const Vec2& p1 = cloud.pts[static_cast<std::size_t>(neighbor)];
    const Vec2 d = p1 - p0;
    const double L2 = d.squaredNorm();
    if (L2 <= 0.0) throw Error("two_point_fallback: coincident points");

    Eigen::MatrixXd C1 = Eigen::MatrixXd::Zero(2, 2);
    C1(0, 0) = -d.x() / L2;
    C1(0, 1) = d.x() / L2;
    C1(1, 0) = -d.y() / L2;
    C1(1, 1) = d.y() / L2;

    RecoveryMatrix rec;
    rec.order = order;
    rec.points = {point, neighbor};
    rec.C = interleave(C1, order);
    return rec;
}

double csrbf_kernel(double d, double r) {
    if (d > r) return 0.0;
    const double s = d / r;
    const double t = 1.0 - s;
    return t * t * t * (1.0 + 3.0 * s);
}

namespace {

// dR/dx_k = -12 (1 - d/r)^2 (x - xi)_k / r^2
Vec2 csrbf_grad(const Vec2& x, const Vec2& xi, double r) {
    const Vec2 dx = x - xi;
    const double d = dx.norm();
    if (d > r) return Vec2::Zero();
    const double t = 1.0 - d / r;
    return (-12.0 * t * t / (r * r)) * dx;
}

// Hessian of the kernel; the d -> 0 limit is -12/r^2 * I.
Eigen::Matrix2d csrbf_hess(const Vec2& x, const Vec2& xi, double r) {
    const Vec2 dx = x - xi;
    const double d = dx.norm();
    if (d > r) return Eigen::Matrix2d::Zero();
    const double t = 1.0 - d / r;
    Eigen::Matrix2d H = -12.0 * t * t / (r * r) * Eigen::Matrix2d::Identity();
    if (d > 1e-14 * r)
        H += (24.0 * t / (r * r * r * d)) * (dx * dx.transpose());
    return H;
}

int poly_terms(int order) { return order >= 2 ? 6 : 3; }

Eigen::RowVectorXd poly_row(const Vec2& x, const Vec2& x0, int order) {
    const double dx = x.x() - x0.x();
    const double dy = x.y() - x0.y();
    Eigen::RowVectorXd s(poly_terms(order));
    s(0) = 1.0;
    s(1) = dx;
    s(2) = dy;
    if (order >= 2) {
        s(3) = dx * dx;
        s(4) = dy * dy;
        s(5) = dx * dy;
    }
    return s;
}

// derivative index: 0 d/dx1, 1 d/dx2, 2 d2/dx1^2, 3 d2/dx2^2, 4 d2/dx1dx2
Eigen::RowVectorXd poly_deriv_row(const Vec2& x, const Vec2& x0, int order, int deriv) {
    const double dx = x.x() - x0.x();
    const double dy = x.y() - x0.y();
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(poly_terms(order));
    switch (deriv) {
        case 0:
            s(1) = 1.0;
            if (order >= 2) { s(3) = 2.0 * dx; s(5) = dy; }
            break;
        case 1:
            s(2) = 1.0;
            if (order >= 2) { s(4) = 2.0 * dy; s(5) = dx; }
            break;
        case 2:
            if (order >= 2) s(3) = 2.0;
            break;
        case 3:
            if (order >= 2) s(4) = 2.0;
            break;
        case 4:
            if (order >= 2) s(5) = 1.0;
            break;
        default: break;
    }
    return s;
}

} // namespace

RecoveryMatrix csrbf_recovery(const PointCloud& cloud, const Support& support,
                              int point, int order, double radius) {
    const int m = static_cast<int>(support.ids.size());
    if (m == 0)
        throw IsolatedPointError("csrbf_recovery: point " + std::to_string(point) +
                                     " has an empty support",
                                 point);
    const int q1 = poly_terms(order);
    if (m + 1 < q1)
        throw RecoveryError("csrbf_recovery: support of point " + std::to_string(point) +
                            " too small (" + std::to_string(m + 1) + " < " +
                            std::to_string(q1) + ")");

    const Vec2& x0 = cloud.pts[static_cast<std::size_t>(point)];
    std::vector<Vec2> xs;
    xs.push_back(x0);
    double dmax = 0.0;
    for (int id : support.ids) {
        xs.push_back(cloud.pts[static_cast<std::size_t>(id)]);
        dmax = std::max(dmax, (xs.back() - x0).norm());
    }
    if (radius < dmax)
        throw RecoveryError("csrbf_recovery: radius " + std::to_string(radius) +
                            " smaller than farthest support distance " +
                            std::to_string(dmax) + " (support would be annihilated)");

    const int np = m + 1;
    const int ng = np + q1;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ng, ng);
    for (int i = 0; i < np; ++i)
        for (int j = 0; j < np; ++j)
            G(i, j) = csrbf_kernel((xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]).norm(), radius);
    for (int i = 0; i < np; ++i) {
        const Eigen::RowVectorXd s = poly_row(xs[static_cast<std::size_t>(i)], x0, order);
        G.block(i, np, 1, q1) = s;
        G.block(np, i, q1, 1) = s.transpose();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) {
        const double cond = lu.rcond() > 0.0 ? 1.0 / lu.rcond() : std::numeric_limits<double>::infinity();
        throw RecoveryError("csrbf_recovery: singular interpolation matrix at point " +
                                std::to_string(point),
                            cond);
    }

    const int nderiv = order >= 2 ? 5 : 2;
    Eigen::MatrixXd lhs(nderiv, ng);
    for (int d = 0; d < nderiv; ++d) {
        Eigen::RowVectorXd row(ng);
        for (int i = 0; i < np; ++i) {
            switch (d) {
                case 0: row(i) = csrbf_grad(x0, xs[static_cast<std::size_t>(i)], radius).x(); break;
                case 1: row(i) = csrbf_grad(x0, xs[static_cast<std::size_t>(i)], radius).y(); break;
                case 2: row(i) = csrbf_hess(x0, xs[static_cast<std::size_t>(i)], radius)(0, 0); break;
                case 3: row(i) = csrbf_hess(x0, xs[static_cast<std::size_t>(i)], radius)(1, 1); break;
                case 4: row(i) = csrbf_hess(x0, xs[static_cast<std::size_t>(i)], radius)(0, 1); break;
                default: break;
            }
        }
        row.segment(np, q1) = poly_deriv_row(x0, x0, order, d);
        lhs.row(d) = row;
    }

    // phi rows: first np columns of lhs * G^-1 (the trailing block multiplies
    // the zero padding of u-hat)
    const Eigen::MatrixXd phi = lu.solve(lhs.transpose()).transpose().leftCols(np);

    RecoveryMatrix rec;
    rec.order = order;
    rec.points.push_back(point);
    rec.points.insert(rec.points.end(), support.ids.begin(), support.ids.end());
    rec.C = interleave(phi, order);
    return rec;
}

Eigen::MatrixXd ShapeSet::N(const Vec2& x) const {
    const int nb = order >= 2 ? 5 : 2;
    const Eigen::RowVectorXd h = basis_row(x, x0, order);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2 * nb);
    H.block(0, 0, 1, nb) = h;
    H.block(1, nb, 1, nb) = h;
    Eigen::MatrixXd out = H * rec.C;
    out(0, 0) += 1.0;
    out(1, 1) += 1.0;
    return out;
}

Eigen::MatrixXd ShapeSet::B(const Vec2& x) const {
    if (order == 1) return B0;
    const Eigen::RowVectorXd d1 = poly_deriv_row(x, x0, 2, 0).segment(1, 5);
    const Eigen::RowVectorXd d2 = poly_deriv_row(x, x0, 2, 1).segment(1, 5);
    // rows of h = (dx, dy, dx^2/2, dy^2/2, dx dy): dh/dx1 = (1,0,dx,0,dy),
    // dh/dx2 = (0,1,0,dy,dx)
    const double dx = x.x() - x0.x();
    const double dy = x.y() - x0.y();
    Eigen::RowVectorXd h1(5), h2(5);
    h1 << 1.0, 0.0, dx, 0.0, dy;
    h2 << 0.0, 1.0, 0.0, dy, dx;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 10);
    S.block(0, 0, 1, 5) = h1;
    S.block(1, 5, 1, 5) = h2;
    S.block(2, 0, 1, 5) = h2;
    S.block(2, 5, 1, 5) = h1;
    return S * rec.C;
}

Eigen::MatrixXd ShapeSet::grad(const Vec2& x) const {
    if (order == 1) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
        S(0, 0) = S(1, 1) = S(2, 2) = S(3, 3) = 1.0;
        return S * rec.C;
    }
    const double dx = x.x() - x0.x();
    const double dy = x.y() - x0.y();
    Eigen::RowVectorXd h1(5), h2(5);
    h1 << 1.0, 0.0, dx, 0.0, dy;
    h2 << 0.0, 1.0, 0.0, dy, dx;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 10);
    S.block(0, 0, 1, 5) = h1;
    S.block(1, 0, 1, 5) = h2;
    S.block(2, 5, 1, 5) = h1;
    S.block(3, 5, 1, 5) = h2;
    return S * rec.C;
}

ShapeSet shape_matrices(const RecoveryMatrix& rec, const Vec2& point_coords) {
    ShapeSet s;
    s.point = rec.points.empty() ? -1 : rec.points.front();
    s.order = rec.order;
    s.x0 = point_coords;
    s.rec = rec;
    s.dofs.reserve(2 * rec.points.size());
    for (int p : rec.points) {
        s.dofs.push_back(2 * p);
        s.dofs.push_back(2 * p + 1);
    }
    if (s.order == 1) {
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3, 4);
        S(0, 0) = 1.0;   // e11 = du1/dx1
        S(1, 3) = 1.0;   // e22 = du2/dx2
        S(2, 1) = 1.0;   // 2 e12 = du1/dx2 + du2/dx1
        S(2, 2) = 1.0;
        s.B0 = S * rec.C;
    }
    return s;
}

ShapeSet build_point_shapes(const Partition& partition,
                            const std::vector<std::uint8_t>& released,
                            int point, const ApproxConfig& cfg) {
    const int rings = cfg.default_rings();
    Support support = neighbor_support(partition, released, point, rings);

    auto finish = [&](const RecoveryMatrix& rec) {
        return shape_matrices(rec, partition.cloud.pts[static_cast<std::size_t>(point)]);
    };

    if (support.ids.empty()) {
        // isolated subdomain: zero strain stiffness, own DoFs only
        RecoveryMatrix rec;
        rec.order = cfg.order;
        rec.points = {point};
        rec.C = Eigen::MatrixXd::Zero(cfg.order >= 2 ? 10 : 4, 2);
        return finish(rec);
    }
    if (support.ids.size() == 1)
        return finish(two_point_fallback(partition.cloud, point, support.ids.front(), cfg.order));

    auto recover = [&](const Support& sup) {
        if (cfg.backend == RecoveryBackend::Csrbf) {
            double dmax = 0.0;
            const Vec2& x0 = partition.cloud.pts[static_cast<std::size_t>(point)];
            for (int id : sup.ids)
                dmax = std::max(dmax, (partition.cloud.pts[static_cast<std::size_t>(id)] - x0).norm());
            return csrbf_recovery(partition.cloud, sup, point, cfg.order,
                                  cfg.csrbf_radius_factor * dmax);
        }
        return gfd_recovery(partition.cloud, sup, point, cfg.order);
    };

    auto nearest_fallback = [&] {
        const Vec2& x0 = partition.cloud.pts[static_cast<std::size_t>(point)];
        int best = support.ids.front();
        double bd = (partition.cloud.pts[static_cast<std::size_t>(best)] - x0).norm();
        for (int id : support.ids) {
            const double d = (partition.cloud.pts[static_cast<std::size_t>(id)] - x0).norm();
            if (d < bd) {
                bd = d;
                best = id;
            }
        }
        return finish(two_point_fallback(partition.cloud, point, best, cfg.order));
    };

    try {
        return finish(recover(support));
    } catch (const RecoveryError&) {
        Support wider = rings >= 2 ? support
                                   : neighbor_support(partition, released, point, rings + 1);
        if (wider.ids.size() > support.ids.size()) {
            try {
                return finish(recover(wider));
            } catch (const RecoveryError&) {
            }
        }
        // dense cracking can leave only collinear supports; the directional
        // difference along the nearest neighbor is all the data supports
        return nearest_fallback();
    }
}

} // namespace fpm
