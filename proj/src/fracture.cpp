#include "fpm/fracture.hpp"
#include "fpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fpm {

std::vector<int> crack_tips(const Partition& partition, const CrackState& crack) {
    std::vector<int> tips;
    for (int v = 0; v < static_cast<int>(partition.vertices.size()); ++v) {
        int n_rel = 0, n_unrel = 0;
        for (int s : partition.vertex_internal[static_cast<std::size_t>(v)])
            (crack.released[static_cast<std::size_t>(s)] ? n_rel : n_unrel)++;
        if (n_rel == 1 && n_unrel >= 1) tips.push_back(v);
    }
    return tips;
}

void release_segment(Workspace& ws, int segment, int step, double value) {
    const Partition& part = ws.partition();
    if (segment < 0 || segment >= static_cast<int>(part.internal.size()))
        throw FractureError("release_segment: not an internal segment id");
    if (ws.crack.released[static_cast<std::size_t>(segment)])
        throw FractureError("release_segment: segment " + std::to_string(segment) +
                            " already released");

    const auto& seg = part.internal[static_cast<std::size_t>(segment)];

    // drop the segment's flux/penalty block
    auto& seg_block = ws.cache.segment_blocks[static_cast<std::size_t>(segment)];
    if (!seg_block.dofs.empty()) {
        scatter_add(ws.system.K, seg_block, -1.0);
        seg_block = {};
    }
    ws.crack.released[static_cast<std::size_t>(segment)] = 1;
    ws.crack.history.push_back({step, segment, value});

    // points whose support can see the released pair
    std::vector<int> candidates;
    for (int p = 0; p < part.n_points(); ++p) {
        const auto& pts = ws.shapes[static_cast<std::size_t>(p)].rec.points;
        if (p == seg.left || p == seg.right ||
            std::find(pts.begin(), pts.end(), seg.left) != pts.end() ||
            std::find(pts.begin(), pts.end(), seg.right) != pts.end())
            candidates.push_back(p);
    }

    const Eigen::Matrix3d D = elasticity_matrix(ws.model->material);
    std::vector<int> changed;
    for (int p : candidates) {
        ShapeSet fresh = build_point_shapes(part, ws.crack.released, p, ws.cfg);
        if (fresh.rec.points == ws.shapes[static_cast<std::size_t>(p)].rec.points &&
            p != seg.left && p != seg.right)
            continue;   // support unchanged, recovery unchanged
        changed.push_back(p);
        scatter_add(ws.system.K, ws.cache.point_blocks[static_cast<std::size_t>(p)], -1.0);
        ws.shapes[static_cast<std::size_t>(p)] = std::move(fresh);
        ws.cache.point_blocks[static_cast<std::size_t>(p)] =
            point_stiffness(ws.shapes[static_cast<std::size_t>(p)], D,
                            part.cells[static_cast<std::size_t>(p)], ws.cfg.order);
        scatter_add(ws.system.K, ws.cache.point_blocks[static_cast<std::size_t>(p)], 1.0);
        ws.cache.load_blocks[static_cast<std::size_t>(p)] =
            point_loads(part, ws.shapes[static_cast<std::size_t>(p)], p,
                        ws.model->body_force, ws.cfg.order);
    }

    std::set<int> touch_segs;
    for (int p : changed)
        for (int s : part.cell_internal[static_cast<std::size_t>(p)])
            if (s != segment && !ws.crack.released[static_cast<std::size_t>(s)])
                touch_segs.insert(s);
    for (int s : touch_segs) {
        scatter_add(ws.system.K, ws.cache.segment_blocks[static_cast<std::size_t>(s)], -1.0);
        const auto& sg = part.internal[static_cast<std::size_t>(s)];
        ws.cache.segment_blocks[static_cast<std::size_t>(s)] =
            boundary_stiffness(sg, ws.shapes[static_cast<std::size_t>(sg.left)],
                               ws.shapes[static_cast<std::size_t>(sg.right)], D,
                               ws.model->eta, ws.cfg.order);
        scatter_add(ws.system.K, ws.cache.segment_blocks[static_cast<std::size_t>(s)], 1.0);
    }
}

double segment_hoop_traction(const FieldSolution& sol, const Partition& partition,
                             const std::vector<ShapeSet>& shapes,
                             const MaterialModel& material, int segment) {
    const auto& seg = partition.internal[static_cast<std::size_t>(segment)];
    const Eigen::Vector3d s = segment_stress(sol, partition, shapes, material, segment);
    const Vec2& n = seg.normal;
    return s(0) * n.x() * n.x() + s(1) * n.y() * n.y() + 2.0 * s(2) * n.x() * n.y();
}

std::optional<int> propagate_max_hoop(const FieldSolution& sol, const Partition& partition,
                                      const std::vector<ShapeSet>& shapes,
                                      const MaterialModel& material,
                                      const CrackState& crack, int tip_vertex) {
    std::optional<int> best;
    double best_val = 0.0;
    for (int s : partition.vertex_internal[static_cast<std::size_t>(tip_vertex)]) {
        if (crack.released[static_cast<std::size_t>(s)]) continue;
        const double v = segment_hoop_traction(sol, partition, shapes, material, s);
        if (!best || v > best_val + 0.0) {
            best = s;
            best_val = v;
        }
        // ties keep the lowest id: ids are visited in ascending order and a
        // later equal value does not replace the incumbent
    }
    return best;
}

namespace {

// pieces of the segment a-b covered by partition cells: (cell, t0, t1)
struct PathPiece {
    int cell;
    double t0, t1;
};

std::vector<PathPiece> path_pieces(const Partition& partition, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len = d.norm();
    std::vector<PathPiece> pieces;
    const double tol = 1e-12;
    for (int c = 0; c < partition.n_points(); ++c) {
        const Polygon& poly = partition.cells[static_cast<std::size_t>(c)];
        std::vector<double> ts = {0.0, 1.0};
        const std::size_t m = poly.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2& p = poly[i];
            const Vec2& q = poly[(i + 1) % m];
            const Vec2 e = q - p;
            const double den = d.x() * e.y() - d.y() * e.x();
            if (std::abs(den) < 1e-300) continue;
            const Vec2 w = p - a;
            const double t = (w.x() * e.y() - w.y() * e.x()) / den;
            const double u = (w.x() * d.y() - w.y() * d.x()) / den;
            if (t > -tol && t < 1.0 + tol && u > -tol && u < 1.0 + tol)
                ts.push_back(std::clamp(t, 0.0, 1.0));
        }
        std::sort(ts.begin(), ts.end());
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            const double t0 = ts[i], t1 = ts[i + 1];
            if ((t1 - t0) * len < 1e-12 * std::max(1.0, len)) continue;
            const Vec2 mid = a + 0.5 * (t0 + t1) * d;
            if (point_in_polygon(poly, mid, 0.0)) pieces.push_back({c, t0, t1});
        }
    }
    // overlap trimming: a path running along a shared cell edge would be
    // claimed by both cells
    std::sort(pieces.begin(), pieces.end(), [](const PathPiece& x, const PathPiece& y) {
        return x.t0 != y.t0 ? x.t0 < y.t0 : x.t1 < y.t1;
    });
    std::vector<PathPiece> out;
    double covered = 0.0;
    for (auto piece : pieces) {
        piece.t0 = std::max(piece.t0, covered);
        if (piece.t1 - piece.t0 < 1e-14) continue;
        covered = piece.t1;
        out.push_back(piece);
    }
    return out;
}

struct CellField {
    Eigen::Vector3d stress;
    Eigen::Vector3d strain;
    Eigen::Matrix2d grad;   // [du1/dx1 du1/dx2; du2/dx1 du2/dx2]
    double W;
};

CellField cell_field_at(const FieldSolution& sol, const std::vector<ShapeSet>& shapes,
                        const Eigen::Matrix3d& D, int cell, const Vec2& x) {
    const ShapeSet& s = shapes[static_cast<std::size_t>(cell)];
    Eigen::VectorXd ue(s.n_dofs());
    for (int i = 0; i < s.n_dofs(); ++i) ue(i) = sol.q(s.dofs[static_cast<std::size_t>(i)]);
    CellField f;
    const Eigen::VectorXd g = s.grad(x) * ue;
    f.grad << g(0), g(1), g(2), g(3);
    f.strain = Eigen::Vector3d(g(0), g(3), g(1) + g(2));
    f.stress = D * f.strain;
    f.W = 0.5 * f.strain.dot(f.stress);
    return f;
}

struct ContourSide {
    Vec2 a, b;
    Vec2 n;        // outward, global
    bool is_mouth; // side crossed by the crack behind the tip
};

std::array<ContourSide, 4> contour_sides(const ContourRect& contour) {
    const Vec2 o = contour.frame.origin;
    const Vec2 e1 = contour.frame.e1;
    const Vec2 e2 = contour.frame.e2();
    const double l = contour.half_len, w = contour.half_wid;
    const Vec2 A = o - l * e1 - w * e2;
    const Vec2 B = o + l * e1 - w * e2;
    const Vec2 C = o + l * e1 + w * e2;
    const Vec2 Dq = o - l * e1 + w * e2;
    return {ContourSide{A, B, -e2, false}, ContourSide{B, C, e1, false},
            ContourSide{C, Dq, e2, false}, ContourSide{Dq, A, -e1, true}};
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        return (q.x() - p.x()) * (r.y() - p.y()) - (q.y() - p.y()) * (r.x() - p.x());
    };
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

void check_contour(const Partition& partition, const std::vector<std::uint8_t>& released,
                   const std::array<ContourSide, 4>& sides) {
    for (const auto& side : sides) {
        for (const auto& ext : partition.external)
            if (segments_cross(side.a, side.b, ext.a, ext.b))
                throw FractureError("contour crosses the domain boundary");
        if (side.is_mouth) continue;
        for (int s = 0; s < static_cast<int>(partition.internal.size()); ++s) {
            if (!released[static_cast<std::size_t>(s)]) continue;
            const auto& seg = partition.internal[static_cast<std::size_t>(s)];
            if (segments_cross(side.a, side.b, seg.a, seg.b))
                throw FractureError(
                    "contour crosses a released segment away from the crack mouth");
        }
    }
}

double typical_spacing(const Partition& partition) {
    double h = 0.0;
    int n = 0;
    for (const auto& seg : partition.internal) {
        h += seg.length;
        ++n;
    }
    return n > 0 ? h / n : partition.diameter;
}

// integrate f(cell, x) ds along the contour, subdividing cell pieces to
// roughly half the point spacing
template <typename F>
double contour_integrate(const Partition& partition,
                         const std::array<ContourSide, 4>& sides, double max_piece,
                         F&& f) {
    double total = 0.0;
    for (const auto& side : sides) {
        const Vec2 d = side.b - side.a;
        const double len = d.norm();
        for (const auto& piece : path_pieces(partition, side.a, side.b)) {
            const double plen = (piece.t1 - piece.t0) * len;
            const int nsub = std::max(1, static_cast<int>(std::ceil(plen / max_piece)));
            for (int k = 0; k < nsub; ++k) {
                const double tm =
                    piece.t0 + (piece.t1 - piece.t0) * ((k + 0.5) / static_cast<double>(nsub));
                total += f(piece.cell, side.a + tm * d, side.n) * (plen / nsub);
            }
        }
    }
    return total;
}

} // namespace

double j_integral(const FieldSolution& sol, const Partition& partition,
                  const std::vector<ShapeSet>& shapes, const MaterialModel& material,
                  const std::vector<std::uint8_t>& released, const ContourRect& contour) {
    const auto sides = contour_sides(contour);
    check_contour(partition, released, sides);
    const Eigen::Matrix3d D = elasticity_matrix(material);
    const Vec2 e1 = contour.frame.e1;
    const double h = typical_spacing(partition);

    return contour_integrate(
        partition, sides, 0.5 * h, [&](int cell, const Vec2& x, const Vec2& n) {
            const CellField f = cell_field_at(sol, shapes, D, cell, x);
            const Vec2 traction(f.stress(0) * n.x() + f.stress(2) * n.y(),
                                f.stress(2) * n.x() + f.stress(1) * n.y());
            const Vec2 du_dx1 = f.grad * e1;   // directional derivative along the crack
            return f.W * n.dot(e1) - traction.dot(du_dx1);
        });
}

namespace {

AuxState aux_from_mode(double r, double theta, const MaterialModel& material, bool mode1) {
    const double kappa = (3.0 - material.nubar()) / (1.0 + material.nubar());
    const double mu = material.Ebar() / (2.0 * (1.0 + material.nubar()));
    const double c = 1.0 / (2.0 * mu * std::sqrt(2.0 * M_PI));
    const double ct = std::cos(theta), st = std::sin(theta);
    const double c2 = std::cos(0.5 * theta), s2 = std::sin(0.5 * theta);
    const double c32 = std::cos(1.5 * theta), s32 = std::sin(1.5 * theta);
    const double sq = std::sqrt(r);
    if (r <= 0.0) throw FractureError("auxiliary field evaluated at the crack tip");

    double g1, g1p, g2, g2p;   // u1 = c sqrt(r) g1(theta), u2 = c sqrt(r) g2(theta)
    Eigen::Vector3d sig;
    const double amp = 1.0 / std::sqrt(2.0 * M_PI * r);
    if (mode1) {
        g1 = c2 * (kappa - ct);
        g1p = -0.5 * s2 * (kappa - ct) + c2 * st;
        g2 = s2 * (kappa - ct);
        g2p = 0.5 * c2 * (kappa - ct) + s2 * st;
        sig = amp * Eigen::Vector3d(c2 * (1.0 - s2 * s32), c2 * (1.0 + s2 * s32), c2 * s2 * c32);
    } else {
        g1 = s2 * (kappa + 2.0 + ct);
        g1p = 0.5 * c2 * (kappa + 2.0 + ct) - s2 * st;
        g2 = -c2 * (kappa - 2.0 + ct);
        g2p = 0.5 * s2 * (kappa - 2.0 + ct) + c2 * st;
        sig = amp * Eigen::Vector3d(-s2 * (2.0 + c2 * c32), s2 * c2 * c32, c2 * (1.0 - s2 * s32));
    }

    // d/dx1 = cos(t) d/dr - sin(t)/r d/dt ; d/dx2 = sin(t) d/dr + cos(t)/r d/dt
    const double u1_x1 = c / sq * (0.5 * g1 * ct - g1p * st);
    const double u1_x2 = c / sq * (0.5 * g1 * st + g1p * ct);
    const double u2_x1 = c / sq * (0.5 * g2 * ct - g2p * st);
    const double u2_x2 = c / sq * (0.5 * g2 * st + g2p * ct);

    AuxState aux;
    aux.stress = sig;
    aux.strain = Eigen::Vector3d(u1_x1, u2_x2, u1_x2 + u2_x1);
    aux.du_dx1 = Vec2(u1_x1, u2_x1);
    return aux;
}

} // namespace

AuxState mode1_aux(double r, double theta, const MaterialModel& material) {
    return aux_from_mode(r, theta, material, true);
}

AuxState mode2_aux(double r, double theta, const MaterialModel& material) {
    return aux_from_mode(r, theta, material, false);
}

SifPair interaction_integral_sifs(const FieldSolution& sol, const Partition& partition,
                                  const std::vector<ShapeSet>& shapes,
                                  const MaterialModel& material,
                                  const std::vector<std::uint8_t>& released,
                                  const ContourRect& contour) {
    const auto sides = contour_sides(contour);
    check_contour(partition, released, sides);
    const Eigen::Matrix3d D = elasticity_matrix(material);
    const Vec2 e1 = contour.frame.e1;
    const Vec2 e2 = contour.frame.e2();
    const double h = typical_spacing(partition);

    auto interaction = [&](bool mode1) {
        return contour_integrate(
            partition, sides, 0.5 * h, [&](int cell, const Vec2& x, const Vec2& n) {
                const CellField f = cell_field_at(sol, shapes, D, cell, x);
                // rotate numerical fields into the crack frame
                Eigen::Matrix2d R;
                R << e1.x(), e2.x(), e1.y(), e2.y();
                Eigen::Matrix2d S;
                S << f.stress(0), f.stress(2), f.stress(2), f.stress(1);
                const Eigen::Matrix2d Sh = R.transpose() * S * R;
                const Eigen::Matrix2d Gh = R.transpose() * f.grad * R;
                const Eigen::Vector2d nh(n.dot(e1), n.dot(e2));

                const Vec2 rel = x - contour.frame.origin;
                const double xi = rel.dot(e1), zeta = rel.dot(e2);
                const AuxState aux = aux_from_mode(std::hypot(xi, zeta),
                                                   std::atan2(zeta, xi), material, mode1);

                // W12 = sigma(1):eps(2) (equals sigma(2):eps(1) for shared D)
                const Eigen::Vector3d sh(Sh(0, 0), Sh(1, 1), Sh(0, 1));
                const double W12 = sh(0) * aux.strain(0) + sh(1) * aux.strain(1) +
                                   sh(2) * aux.strain(2);

                const Eigen::Vector2d t_num(Sh(0, 0) * nh(0) + Sh(0, 1) * nh(1),
                                            Sh(0, 1) * nh(0) + Sh(1, 1) * nh(1));
                const Eigen::Vector2d t_aux(
                    aux.stress(0) * nh(0) + aux.stress(2) * nh(1),
                    aux.stress(2) * nh(0) + aux.stress(1) * nh(1));
                const Eigen::Vector2d du_num(Gh(0, 0), Gh(1, 0));

                return W12 * nh(0) - t_num.dot(Vec2(aux.du_dx1)) - t_aux.dot(du_num);
            });
    };

    SifPair out;
    out.contour = contour;
    out.KI = 0.5 * material.Ebar() * interaction(true);
    out.KII = 0.5 * material.Ebar() * interaction(false);
    return out;
}

BerRecord ber(const FieldSolution& sol, const Partition& partition,
              const std::vector<ShapeSet>& shapes, const MaterialModel& material,
              double eta, int segment, const Vec2& e1) {
    const auto& seg = partition.internal[static_cast<std::size_t>(segment)];
    const ShapeSet& left = shapes[static_cast<std::size_t>(seg.left)];
    const ShapeSet& right = shapes[static_cast<std::size_t>(seg.right)];
    if (left.order != 1 || right.order != 1)
        throw FractureError("ber: only linear trials are supported");

    const Eigen::Matrix3d D = elasticity_matrix(material);
    auto ue_of = [&](const ShapeSet& s) {
        Eigen::VectorXd ue(s.n_dofs());
        for (int i = 0; i < s.n_dofs(); ++i) ue(i) = sol.q(s.dofs[static_cast<std::size_t>(i)]);
        return ue;
    };
    const Eigen::VectorXd uel = ue_of(left), uer = ue_of(right);

    BerRecord rec;
    rec.segment = segment;
    for (const auto& qp : segment_rule(seg.a, seg.b, 2)) {
        const CellField fl = cell_field_at(sol, shapes, D, seg.left, qp.x);
        const CellField fr = cell_field_at(sol, shapes, D, seg.right, qp.x);
        const Vec2 jump_u = Vec2(left.N(qp.x) * uel) - Vec2(right.N(qp.x) * uer);
        const Vec2 jump_du = (fl.grad - fr.grad) * e1;
        const Eigen::Vector3d savg = 0.5 * (fl.stress + fr.stress);
        const Vec2 t_avg(savg(0) * seg.normal.x() + savg(2) * seg.normal.y(),
                         savg(2) * seg.normal.x() + savg(1) * seg.normal.y());
        rec.penalty_term += -qp.w * eta / seg.length * jump_du.dot(jump_u);
        rec.flux_term += qp.w * t_avg.dot(jump_du);
        // strain-energy-density jump; drops out when x^1 is the segment
        // tangent (n.e1 = 0), which is the per-segment criterion case
        rec.w_jump_term += -qp.w * (fl.W - fr.W) * seg.normal.dot(e1);
    }
    rec.value = rec.penalty_term + rec.flux_term + rec.w_jump_term;
    return rec;
}

DriveResult quasi_static_drive(Workspace& ws, const Criterion& criterion, int max_steps,
                               LoadProgramKind program) {
    if (criterion.kind == CriterionKind::BerInitiation && ws.cfg.order != 1)
        throw FractureError("BER criterion requires linear trials");

    const Partition& part = ws.partition();
    DriveResult result;
    for (int step = 1; step <= max_steps; ++step) {
        const double scale = program == LoadProgramKind::Ramp
                                 ? static_cast<double>(step) / max_steps
                                 : 1.0;
        DriveStep ds;
        ds.step = step;
        ds.scale = scale;
        try {
            ds.solution = ws.solve(scale);
        } catch (const SingularSystemError& err) {
            result.disconnected = true;
            result.message = std::string("structure disconnected at step ") +
                             std::to_string(step) + ": " + err.what();
            return result;
        }

        std::vector<std::pair<int, double>> to_release;
        if (criterion.kind == CriterionKind::MaxHoop) {
            std::set<int> chosen;
            for (int tip : crack_tips(part, ws.crack)) {
                auto best = propagate_max_hoop(ds.solution, part, ws.shapes,
                                               ws.model->material, ws.crack, tip);
                if (best && !chosen.count(*best)) {
                    chosen.insert(*best);
                    to_release.emplace_back(
                        *best, segment_hoop_traction(ds.solution, part, ws.shapes,
                                                     ws.model->material, *best));
                }
            }
        } else {
            for (int s = 0; s < static_cast<int>(part.internal.size()); ++s) {
                if (ws.crack.released[static_cast<std::size_t>(s)]) continue;
                double v = 0.0;
                if (criterion.kind == CriterionKind::HoopInitiation) {
                    v = segment_hoop_traction(ds.solution, part, ws.shapes,
                                              ws.model->material, s);
                } else {
                    const auto& seg = part.internal[static_cast<std::size_t>(s)];
                    const Vec2 tangent = (seg.b - seg.a) / seg.length;
                    v = std::abs(ber(ds.solution, part, ws.shapes, ws.model->material,
                                     ws.model->eta, s, tangent)
                                     .value);
                }
                if (v > criterion.threshold) to_release.emplace_back(s, v);
            }
        }

        for (const auto& [s, v] : to_release) {
            release_segment(ws, s, step, v);
            ds.events.push_back({step, s, v});
        }
        result.steps.push_back(std::move(ds));

        const bool ramp_done = program == LoadProgramKind::Constant || step == max_steps;
        if (to_release.empty() && ramp_done) break;
        if (criterion.kind == CriterionKind::MaxHoop && to_release.empty()) break;
    }
    return result;
}

} // namespace fpm
