#include "fpm/benchmarks.hpp"
#include "fpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fpm {

AnalyticField patch_field(double E, double nu) {
    AnalyticField f;
    f.displacement = [](const Vec2& x) { return Vec2(x.x() + x.y(), x.x() + x.y()); };
    const Eigen::Vector3d s(E / (1.0 - nu), E / (1.0 - nu), E / (1.0 + nu));
    f.stress = [s](const Vec2&) { return s; };
    return f;
}

AnalyticField cantilever_field(double P, double E, double nu, double H, double L) {
    const double I = H * H * H / 12.0;
    AnalyticField f;
    f.displacement = [=](const Vec2& x) {
        const double x1 = x.x(), x2 = x.y();
        const double u1 = -P / (6.0 * E * I) * (x2 - 0.5 * H) *
                          (3.0 * x1 * (2.0 * L - x1) + (2.0 + nu) * x2 * (x2 - H));
        const double u2 = P / (6.0 * E * I) *
                          (x1 * x1 * (3.0 * L - x1) +
                           3.0 * nu * (L - x1) * (x2 - 0.5 * H) * (x2 - 0.5 * H) +
                           0.25 * (4.0 + 5.0 * nu) * H * H * x1);
        return Vec2(u1, u2);
    };
    f.stress = [=](const Vec2& x) {
        const double x1 = x.x(), x2 = x.y();
        return Eigen::Vector3d(-P / I * (L - x1) * (x2 - 0.5 * H), 0.0,
                               -P * x2 / (2.0 * I) * (x2 - H));
    };
    return f;
}

AnalyticField ring_field(double a, double b, double p, double E, double nu) {
    const double A = b * b * p / (b * b - a * a);
    const double B = a * a * b * b * p / (b * b - a * a);
    AnalyticField f;
    auto check = [=](double r) {
        if (r < a * (1.0 - 0.02) || r > b * (1.0 + 0.02))
            throw Error("ring_field: radius " + std::to_string(r) + " outside [a, b]");
    };
    f.displacement = [=](const Vec2& x) {
        const double r = x.norm();
        check(r);
        const double ur = ((1.0 - nu) * A * r + (1.0 + nu) * B / r) / E;
        return Vec2(ur * x.x() / r, ur * x.y() / r);
    };
    f.stress = [=](const Vec2& x) {
        const double r = x.norm();
        check(r);
        const double srr = A - B / (r * r);
        const double stt = A + B / (r * r);
        const double c = x.x() / r, s = x.y() / r;
        return Eigen::Vector3d(srr * c * c + stt * s * s, srr * s * s + stt * c * c,
                               (srr - stt) * s * c);
    };
    return f;
}

AnalyticField hole_field(double a, double p, double E, double nu) {
    AnalyticField f;
    auto polar = [=](const Vec2& x, double& r, double& th) {
        r = x.norm();
        if (r < a * (1.0 - 0.02))
            throw Error("hole_field: point inside the hole (r = " + std::to_string(r) + ")");
        th = std::atan2(x.y(), x.x());
    };
    f.displacement = [=](const Vec2& x) {
        double r, th;
        polar(x, r, th);
        const double k = (1.0 + nu) / E * p;
        const double a2r = a * a / r;
        const double u1 = k * (r * std::cos(th) / (1.0 + nu) +
                               2.0 * a2r * std::cos(th) / (1.0 + nu) +
                               0.5 * a2r * std::cos(3.0 * th) -
                               0.5 * a2r * (a / r) * (a / r) * std::cos(3.0 * th));
        const double u2 = k * (-nu * r * std::sin(th) / (1.0 + nu) -
                               (1.0 - nu) * a2r * std::sin(th) / (1.0 + nu) +
                               0.5 * a2r * std::sin(3.0 * th) -
                               0.5 * a2r * (a / r) * (a / r) * std::sin(3.0 * th));
        return Vec2(u1, u2);
    };
    f.stress = [=](const Vec2& x) {
        double r, th;
        polar(x, r, th);
        const double q2 = a * a / (r * r);
        const double q4 = q2 * q2;
        const double c2 = std::cos(2.0 * th), s2v = std::sin(2.0 * th);
        const double c4 = std::cos(4.0 * th), s4 = std::sin(4.0 * th);
        return Eigen::Vector3d(
            p * (1.0 - q2 * (1.5 * c2 + c4) + 1.5 * q4 * c4),
            p * (-q2 * (0.5 * c2 - c4) - 1.5 * q4 * c4),
            p * (-q2 * (0.5 * s2v + s4) + 1.5 * q4 * s4));
    };
    return f;
}

AnalyticField mode1_field(double KI, double E, double nu, PlaneState state) {
    MaterialModel mat{E, nu, state};
    const double kappa = (3.0 - mat.nubar()) / (1.0 + mat.nubar());
    const double mu = mat.Ebar() / (2.0 * (1.0 + mat.nubar()));
    AnalyticField f;
    f.displacement = [=](const Vec2& x) {
        const double r = x.norm();
        if (r <= 0.0) throw Error("mode1_field: singular point");
        const double th = std::atan2(x.y(), x.x());
        const double c2 = std::cos(0.5 * th), s2 = std::sin(0.5 * th);
        const double amp = KI / (2.0 * mu) * std::sqrt(r / (2.0 * M_PI));
        return Vec2(amp * c2 * (kappa - 1.0 + 2.0 * s2 * s2),
                    amp * s2 * (kappa + 1.0 - 2.0 * c2 * c2));
    };
    f.stress = [=](const Vec2& x) {
        const double r = x.norm();
        if (r <= 0.0) throw Error("mode1_field: singular point");
        const double th = std::atan2(x.y(), x.x());
        const double c2 = std::cos(0.5 * th), s2 = std::sin(0.5 * th);
        const double c32 = std::cos(1.5 * th), s32 = std::sin(1.5 * th);
        const double amp = KI / std::sqrt(2.0 * M_PI * r);
        return Eigen::Vector3d(amp * c2 * (1.0 - s2 * s32), amp * c2 * (1.0 + s2 * s32),
                               amp * c2 * s2 * c32);
    };
    return f;
}

std::vector<Vec2> grid_points(const Vec2& lo, const Vec2& hi, int nx, int ny) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double tx = nx > 1 ? static_cast<double>(i) / (nx - 1) : 0.5;
            const double ty = ny > 1 ? static_cast<double>(j) / (ny - 1) : 0.5;
            pts.emplace_back(lo.x() + tx * (hi.x() - lo.x()), lo.y() + ty * (hi.y() - lo.y()));
        }
    return pts;
}

std::vector<Vec2> scatter_points(const Polygon& poly, int n, std::uint64_t seed,
                                 double min_dist_factor) {
    Vec2 lo = poly.front(), hi = poly.front();
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double area = std::abs(polygon_area(poly));
    double min_dist = min_dist_factor * std::sqrt(area / std::max(n, 1));
    const double margin = 0.2 * min_dist;

    SplitMix64 rng(seed);
    std::vector<Vec2> pts;
    int stale = 0;
    while (static_cast<int>(pts.size()) < n) {
        const Vec2 cand(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()));
        bool ok = point_in_polygon(poly, cand, 0.0);
        if (ok) {
            // keep a margin from the boundary so clipped cells stay sane
            for (std::size_t i = 0; ok && i < poly.size(); ++i)
                if (point_segment_distance(cand, poly[i], poly[(i + 1) % poly.size()]) < margin)
                    ok = false;
        }
        for (std::size_t i = 0; ok && i < pts.size(); ++i)
            if ((pts[i] - cand).norm() < min_dist) ok = false;
        if (ok) {
            pts.push_back(cand);
            stale = 0;
        } else if (++stale > 20000) {
            min_dist *= 0.8;   // relax when the polygon saturates
            stale = 0;
        }
    }
    return pts;
}

namespace {

struct DomainBuilder {
    Polygon poly;
    std::vector<BoundaryCondition> bcs;

    // vertices of one boundary section (its geometric end point belongs to
    // the next section); every outgoing edge carries `bc`
    void section(const std::vector<Vec2>& pts, const BoundaryCondition& bc) {
        for (const auto& p : pts) {
            poly.push_back(p);
            bcs.push_back(bc);
        }
    }

    Domain domain() const { return make_domain(poly, bcs); }
};

std::vector<Vec2> arc_points(const Vec2& center, double radius, double th0, double th1,
                             int n, bool include_first, bool include_last) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        if (!include_first && i == 0) continue;
        if (!include_last && i == n - 1) continue;
        const double th = th0 + (th1 - th0) * static_cast<double>(i) / (n - 1);
        pts.emplace_back(center.x() + radius * std::cos(th), center.y() + radius * std::sin(th));
    }
    return pts;
}

std::pair<int, int> parse_grid(const std::string& s, int def_nx, int def_ny) {
    if (s.empty()) return {def_nx, def_ny};
    const auto xpos = s.find('x');
    if (xpos == std::string::npos) return {std::stoi(s), -1};
    return {std::stoi(s.substr(0, xpos)), std::stoi(s.substr(xpos + 1))};
}

int nearest_point(const std::vector<Vec2>& pts, const Vec2& target) {
    int best = 0;
    double bd = (pts[0] - target).squaredNorm();
    for (int i = 1; i < static_cast<int>(pts.size()); ++i) {
        const double d = (pts[static_cast<std::size_t>(i)] - target).squaredNorm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

BoundaryCondition traction_from_field(const AnalyticField& f, const Vec2& normal) {
    return traction_bc([f, normal](const Vec2& x) {
        const Eigen::Vector3d s = f.stress(x);
        return Vec2(s(0) * normal.x() + s(2) * normal.y(),
                    s(2) * normal.x() + s(1) * normal.y());
    });
}

AnalyticField translate_field(const AnalyticField& f, const Vec2& origin) {
    AnalyticField out;
    out.displacement = [f, origin](const Vec2& x) { return f.displacement(x - origin); };
    out.stress = [f, origin](const Vec2& x) { return f.stress(x - origin); };
    return out;
}

Benchmark build_patch(const BenchmarkOptions& opt) {
    const double E = 1.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    const AnalyticField field = patch_field(E, nu);

    DomainBuilder db;
    const Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Vec2 normals[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};
    for (int e = 0; e < 4; ++e)
        db.section({square[static_cast<std::size_t>(e)]}, traction_from_field(field, normals[e]));

    auto [nx, ny] = parse_grid(opt.points, 3, 3);
    PointCloud cloud;
    if (ny > 0) {
        cloud.pts = grid_points({0, 0}, {1, 1}, nx, ny);
    } else {
        cloud.pts = scatter_points(square, nx, opt.seed);
    }
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "patch";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.exact = field.exact();
    bm.model.h_char = 1.0 / std::sqrt(static_cast<double>(cloud.pts.size()));

    const int p0 = nearest_point(cloud.pts, {0, 0});
    int p1 = nearest_point(cloud.pts, {1, 0});
    if (p1 == p0) p1 = (p0 + 1) % cloud.size();
    const Vec2 u0 = field.displacement(cloud.pts[static_cast<std::size_t>(p0)]);
    const Vec2 u1 = field.displacement(cloud.pts[static_cast<std::size_t>(p1)]);
    bm.model.extra_constraints = {{p0, 0, u0.x()}, {p0, 1, u0.y()}, {p1, 1, u1.y()}};
    return bm;
}

Benchmark build_cantilever(const BenchmarkOptions& opt) {
    const double P = 1.0, E = 1e5, H = 1.0, L = 8.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    const AnalyticField field = cantilever_field(P, E, nu, H, L);

    DomainBuilder db;
    db.section({{0, 0}}, traction_from_field(field, {0, -1}));            // bottom
    db.section({{L, 0}}, displacement_bc(field.displacement));           // right
    db.section({{L, H}}, traction_from_field(field, {0, 1}));            // top
    db.section({{0, H}}, displacement_bc(field.displacement));           // left

    auto [nx, ny] = parse_grid(opt.points, 41, 6);
    PointCloud cloud;
    cloud.pts = grid_points({0, 0}, {L, H}, nx, ny);
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "cantilever";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.exact = field.exact();
    bm.model.h_char = L / (nx - 1);
    return bm;
}

Benchmark build_ring(const BenchmarkOptions& opt) {
    const double a = 1.0, b = 2.0, p = 1.0, E = 1e5;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    const AnalyticField field = ring_field(a, b, p, E, nu);

    auto [nr, nt] = parse_grid(opt.points, 15, 21);
    if (nt < 0) nt = nr;

    DomainBuilder db;
    db.section({{a, 0}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {false, true}));
    db.section(arc_points({0, 0}, b, 0.0, M_PI_2, nt, true, false),
               traction_bc([p](const Vec2& x) { return Vec2(p * x.normalized()); }));
    db.section({{0, b}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {true, false}));
    db.section(arc_points({0, 0}, a, M_PI_2, 0.0, nt, true, false), free_bc());

    PointCloud cloud;
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < nr; ++i) {
            const double r = a + (b - a) * static_cast<double>(i) / (nr - 1);
            const double th = M_PI_2 * static_cast<double>(j) / (nt - 1);
            cloud.pts.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "ring_quarter";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.exact = field.exact();
    bm.model.h_char = std::max((b - a) / (nr - 1), b * M_PI_2 / (nt - 1));

    const int probe = nearest_point(cloud.pts, {1.5, 0.0});
    bm.metrics.emplace_back("sigma_rr_r1.5", [probe](const FieldSolution& sol) {
        return sol.stress[static_cast<std::size_t>(probe)](0);
    });
    return bm;
}

Benchmark build_hole(const BenchmarkOptions& opt) {
    const double a = 1.0, p = 1.0, E = 1.0, half = 2.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    const AnalyticField field = hole_field(a, p, E, nu);

    // transfinite blend between the hole arc and the outer two edges
    auto [count, unused] = parse_grid(opt.points, 793, -1);
    (void)unused;
    int ns, ntt;
    if (count == 793) { ns = 61; ntt = 13; }
    else if (count == 217) { ns = 31; ntt = 7; }
    else if (count == 43) { ns = 14; ntt = 3; }
    else {
        ntt = std::max(3, static_cast<int>(std::lround(std::sqrt(count / 5.0))));
        ns = std::max(4, count / ntt);
    }

    auto inner = [&](double s) { return Vec2(a * std::cos(M_PI_2 * s), a * std::sin(M_PI_2 * s)); };
    auto outer = [&](double s) {
        return s <= 0.5 ? Vec2(half, 2.0 * half * s) : Vec2(2.0 * half * (1.0 - s), half);
    };

    PointCloud cloud;
    std::vector<Vec2> arc_row;
    for (int j = 0; j < ntt; ++j)
        for (int i = 0; i < ns; ++i) {
            const double s = static_cast<double>(i) / (ns - 1);
            const double t = static_cast<double>(j) / (ntt - 1);
            const Vec2 pt = (1.0 - t) * inner(s) + t * outer(s);
            cloud.pts.push_back(pt);
            if (j == 0) arc_row.push_back(pt);
        }
    cloud.on_boundary.assign(cloud.pts.size(), false);

    DomainBuilder db;
    db.section({{a, 0}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {false, true}));
    db.section({{half, 0}}, displacement_bc(field.displacement));   // right edge
    db.section({{half, half}}, displacement_bc(field.displacement));// top edge
    db.section({{0, half}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {true, false}));
    std::vector<Vec2> arc_rev(arc_row.rbegin(), arc_row.rend());    // (0,a) down to (a,0)
    arc_rev.pop_back();                                             // (a,0) closes the loop
    db.section(arc_rev, free_bc());

    Benchmark bm;
    bm.model.name = "hole_quarter";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.exact = field.exact();
    bm.model.h_char = (half - a) / (ntt - 1);

    const int probe = nearest_point(cloud.pts, {0.0, a});
    bm.metrics.emplace_back("scf", [probe, p](const FieldSolution& sol) {
        return sol.stress[static_cast<std::size_t>(probe)](0) / p;
    });
    return bm;
}

Benchmark build_mode1(const BenchmarkOptions& opt) {
    const double b = 10.0, a = 5.0, KI = 1.0, E = 1.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    const Vec2 tip(a, 0.5 * b);
    const AnalyticField field = translate_field(mode1_field(KI, E, nu, PlaneState::Stress), tip);

    DomainBuilder db;
    for (const Vec2& v : Polygon{{0, 0}, {b, 0}, {b, b}, {0, b}})
        db.section({v}, displacement_bc(field.displacement));

    auto [nx, ny] = parse_grid(opt.points, 40, 40);
    if (ny < 0) ny = nx;
    PointCloud cloud;
    cloud.pts = grid_points({0, 0}, {b, b}, nx, ny);
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "mode1_square";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.exact = field.exact();
    bm.model.h_char = b / (nx - 1);
    bm.model.precracks = {{Vec2(0, 0.5 * b), tip}};
    bm.fracture = FractureSetup{tip, Vec2(1, 0)};
    return bm;
}

Benchmark build_mixed_mode(const BenchmarkOptions& opt) {
    const double L = 16.0, W = 7.0, a = 3.5, t = 1.0, E = 1.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;

    DomainBuilder db;
    db.section({{0, 0}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }));
    db.section({{W, 0}}, free_bc());
    db.section({{W, L}}, traction_bc(Vec2(t, 0)));
    db.section({{0, L}}, free_bc());

    auto [nx, ny] = parse_grid(opt.points, 36, 80);
    if (ny < 0) ny = nx;
    PointCloud cloud;
    cloud.pts = grid_points({0, 0}, {W, L}, nx, ny);
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "mixed_mode_plate";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.h_char = W / (nx - 1);
    bm.model.precracks = {{Vec2(0, 0.5 * L), Vec2(a, 0.5 * L)}};
    bm.fracture = FractureSetup{Vec2(a, 0.5 * L), Vec2(1, 0)};
    return bm;
}

Benchmark build_cook(const BenchmarkOptions& opt) {
    const double E = 1.0, F = 1.0 / 16.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;
    auto [nx, ny] = parse_grid(opt.points, 17, 17);
    if (ny < 0) ny = nx;

    const Vec2 c00(0, 0), c10(48, 44), c11(48, 60), c01(0, 44);
    MeshInput mesh;
    auto node_id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double xi = static_cast<double>(i) / nx;
            const double et = static_cast<double>(j) / ny;
            mesh.nodes.push_back((1 - xi) * (1 - et) * c00 + xi * (1 - et) * c10 +
                                 xi * et * c11 + (1 - xi) * et * c01);
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            mesh.elements.push_back({node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1),
                                     node_id(i, j + 1)});

    mesh.bcs = {displacement_bc([](const Vec2&) { return Vec2(0, 0); }), traction_bc(Vec2(0, F))};
    for (int j = 0; j < ny; ++j) {
        mesh.tagged_edges.push_back({{node_id(0, j), node_id(0, j + 1)}, 0});
        mesh.tagged_edges.push_back({{node_id(nx, j), node_id(nx, j + 1)}, 1});
    }

    Benchmark bm;
    bm.model.name = "cook";
    bm.model.partition = partition_from_mesh(mesh);
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.h_char = 48.0 / nx;

    const int probe = nearest_point(bm.model.partition.cloud.pts, {48.0, 52.0});
    bm.metrics.emplace_back("u2_A", [probe](const FieldSolution& sol) {
        return sol.q(2 * probe + 1);
    });
    return bm;
}

Benchmark build_square_hole(const BenchmarkOptions& opt) {
    const double E = 1.0, half = 2.0;
    const double s = std::sqrt(2.0) / 2.0;   // hole half-width
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.3;

    DomainBuilder db;
    db.section({{s, 0}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {false, true}));
    db.section({{half, 0}}, free_bc());
    // amplitudes matched so both loading modes reach the same nominal
    // far-field stress at the end of the ramp
    if (opt.traction_control)
        db.section({{half, half}}, traction_bc(Vec2(0, 1)));
    else
        db.section({{half, half}},
                   displacement_bc([](const Vec2&) { return Vec2(0, 2); }, {false, true}));
    db.section({{0, half}}, displacement_bc([](const Vec2&) { return Vec2(0, 0); }, {true, false}));
    db.section({{0, s}}, free_bc());
    db.section({{s, s}}, free_bc());

    auto [n, unused] = parse_grid(opt.points, 25, -1);
    (void)unused;
    PointCloud cloud;
    for (const Vec2& p : grid_points({0, 0}, {half, half}, n, n))
        if (!(p.x() < s - 1e-12 && p.y() < s - 1e-12)) cloud.pts.push_back(p);
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "square_hole_quarter";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.h_char = half / (n - 1);
    return bm;
}

Benchmark build_oblique(const BenchmarkOptions& opt) {
    const double W = 110.0, L = 220.0, a = 20.0, E = 71000.0;
    const double nu = opt.nu >= 0.0 ? opt.nu : 0.33;
    const double beta = opt.beta_deg * M_PI / 180.0;

    DomainBuilder db;
    db.section({{0, 0}}, traction_bc(Vec2(0, -1)));
    db.section({{W, 0}}, free_bc());
    db.section({{W, L}}, traction_bc(Vec2(0, 1)));
    db.section({{0, L}}, free_bc());

    auto [n, unused] = parse_grid(opt.points, 7200, -1);
    (void)unused;
    PointCloud cloud;
    cloud.pts = scatter_points({{0, 0}, {W, 0}, {W, L}, {0, L}}, n, opt.seed);
    cloud.on_boundary.assign(cloud.pts.size(), false);

    Benchmark bm;
    bm.model.name = "oblique_crack_plate";
    bm.model.partition = build_voronoi_partition(cloud, db.domain());
    bm.model.material = {E, nu, PlaneState::Stress};
    bm.model.eta = opt.eta > 0.0 ? opt.eta : E;
    bm.model.h_char = std::sqrt(W * L / n);

    const Vec2 center(0.5 * W, 0.5 * L);
    const Vec2 dir(std::cos(beta), std::sin(beta));
    bm.model.precracks = {{center - 0.5 * a * dir, center + 0.5 * a * dir}};
    bm.fracture = FractureSetup{center + 0.5 * a * dir, dir};

    const int pa = nearest_point(cloud.pts, {0.5 * W, 0.25 * L});
    int pb = nearest_point(cloud.pts, {0.5 * W, 0.75 * L});
    if (pb == pa) pb = (pa + 1) % cloud.size();
    bm.model.extra_constraints = {{pa, 0, 0.0}, {pa, 1, 0.0}, {pb, 0, 0.0}};
    return bm;
}

} // namespace

std::vector<std::string> benchmark_names() {
    return {"patch",        "cantilever",       "ring_quarter",
            "hole_quarter", "mode1_square",     "mixed_mode_plate",
            "cook",         "square_hole_quarter", "oblique_crack_plate"};
}

Benchmark build_benchmark(const std::string& name, const BenchmarkOptions& opt) {
    if (name == "patch") return build_patch(opt);
    if (name == "cantilever") return build_cantilever(opt);
    if (name == "ring_quarter") return build_ring(opt);
    if (name == "hole_quarter") return build_hole(opt);
    if (name == "mode1_square") return build_mode1(opt);
    if (name == "mixed_mode_plate") return build_mixed_mode(opt);
    if (name == "cook") return build_cook(opt);
    if (name == "square_hole_quarter") return build_square_hole(opt);
    if (name == "oblique_crack_plate") return build_oblique(opt);
    throw ConfigError("unknown benchmark: " + name);
}

} // namespace fpm
