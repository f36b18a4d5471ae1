#include "fpm/geometry.hpp"
#include "fpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fpm {

double polygon_area(const Polygon& poly) {
    const std::size_t n = poly.size();
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Vec2 polygon_centroid(const Polygon& poly) {
    const std::size_t n = poly.size();
    double a = 0.0;
    Vec2 c(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double w = p.x() * q.y() - q.x() * p.y();
        a += w;
        c += w * (p + q);
    }
    if (std::abs(a) < 1e-30) {
        c.setZero();
        for (const auto& p : poly) c += p;
        return c / static_cast<double>(n);
    }
    return c / (3.0 * a);
}

double polygon_diameter(const Polygon& poly) {
    Vec2 lo = poly.front(), hi = poly.front();
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double L2 = d.squaredNorm();
    if (L2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(d) / L2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

bool point_in_polygon(const Polygon& poly, const Vec2& p, double boundary_tol) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= boundary_tol)
            return true;
    }
    // even-odd ray crossing, ray along +x
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double xi = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < xi) inside = !inside;
        }
    }
    return inside;
}

BoundaryCondition free_bc() { return {}; }

BoundaryCondition traction_bc(const Vec2& t) {
    BoundaryCondition bc;
    bc.kind = BcKind::Traction;
    bc.value = [t](const Vec2&) { return t; };
    return bc;
}

BoundaryCondition traction_bc(std::function<Vec2(const Vec2&)> t) {
    BoundaryCondition bc;
    bc.kind = BcKind::Traction;
    bc.value = std::move(t);
    return bc;
}

BoundaryCondition displacement_bc(std::function<Vec2(const Vec2&)> u,
                                  std::array<bool, 2> mask) {
    BoundaryCondition bc;
    bc.kind = BcKind::Displacement;
    bc.value = std::move(u);
    bc.mask = mask;
    return bc;
}

Domain make_domain(Polygon poly, std::vector<BoundaryCondition> edge_bcs) {
    if (poly.size() < 3)
        throw GeometryError("domain polygon needs at least 3 vertices");
    if (edge_bcs.size() != poly.size())
        throw GeometryError("domain polygon needs one BC per edge");
    if (polygon_area(poly) < 0.0) {
        // normalize to CCW; edge i = (v[i], v[i+1]) maps to edge n-2-i of the
        // reversed polygon (closing edge n-1 stays last)
        const std::size_t n = poly.size();
        std::reverse(poly.begin(), poly.end());
        std::vector<BoundaryCondition> rb(n);
        for (std::size_t i = 0; i + 1 < n; ++i) rb[n - 2 - i] = edge_bcs[i];
        rb[n - 1] = edge_bcs[n - 1];
        edge_bcs = std::move(rb);
    }
    return Domain{std::move(poly), std::move(edge_bcs)};
}

namespace {

// Cell polygon under construction: tag[k] describes the edge v[k] -> v[k+1].
// domain_edge >= 0 marks a piece of the domain boundary, neighbor >= 0 a
// piece of the bisector shared with that generating point.
struct EdgeTag {
    int domain_edge = -1;
    int neighbor = -1;
};

struct TaggedPoly {
    std::vector<Vec2> v;
    std::vector<EdgeTag> tag;
};

Vec2 line_intersect(const Vec2& a, const Vec2& b, double sa, double sb) {
    const double t = sa / (sa - sb);
    return a + t * (b - a);
}

// Keep {x : n.(x - o) <= 0}. New closing edges are tagged with `neighbor`.
void clip_halfplane(TaggedPoly& poly, const Vec2& o, const Vec2& n,
                    int neighbor, double eps_on) {
    const std::size_t m = poly.v.size();
    if (m == 0) return;
    std::vector<double> s(m);
    bool any_out = false, any_in = false;
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = n.dot(poly.v[i] - o);
        (s[i] > eps_on ? any_out : any_in) = true;
    }
    if (!any_out) return;
    if (!any_in) {
        poly.v.clear();
        poly.tag.clear();
        return;
    }
    TaggedPoly out;
    out.v.reserve(m + 2);
    out.tag.reserve(m + 2);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = (i + 1) % m;
        const bool in_i = s[i] <= eps_on;
        const bool in_j = s[j] <= eps_on;
        if (in_i && in_j) {
            out.v.push_back(poly.v[i]);
            out.tag.push_back(poly.tag[i]);
        } else if (in_i && !in_j) {
            out.v.push_back(poly.v[i]);
            out.tag.push_back(poly.tag[i]);
            out.v.push_back(line_intersect(poly.v[i], poly.v[j], s[i], s[j]));
            out.tag.push_back(EdgeTag{-1, neighbor});
        } else if (!in_i && in_j) {
            out.v.push_back(line_intersect(poly.v[i], poly.v[j], s[i], s[j]));
            out.tag.push_back(poly.tag[i]);
        }
    }
    poly = std::move(out);
}

// Drop zero-length edges and merge consecutive collinear edges carrying the
// same tag (splits introduced by touching clips).
void tidy_poly(TaggedPoly& poly, double meld) {
    bool changed = true;
    while (changed && poly.v.size() >= 3) {
        changed = false;
        const std::size_t m = poly.v.size();
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = (i + 1) % m;
            if ((poly.v[j] - poly.v[i]).norm() <= meld) {
                // edge i has zero length: drop one duplicate vertex together
                // with edge i's tag (wrap-around keeps the pairing aligned)
                poly.v.erase(poly.v.begin() + static_cast<long>(j == 0 ? i : j));
                poly.tag.erase(poly.tag.begin() + static_cast<long>(i));
                changed = true;
                break;
            }
            const std::size_t k = (j + 1) % m;
            const EdgeTag& ti = poly.tag[i];
            const EdgeTag& tj = poly.tag[j];
            if (ti.domain_edge == tj.domain_edge && ti.neighbor == tj.neighbor) {
                const Vec2 d1 = poly.v[j] - poly.v[i];
                const Vec2 d2 = poly.v[k] - poly.v[j];
                const double cross = d1.x() * d2.y() - d1.y() * d2.x();
                if (std::abs(cross) <= meld * (d1.norm() + d2.norm())) {
                    poly.v.erase(poly.v.begin() + static_cast<long>(j));
                    poly.tag.erase(poly.tag.begin() + static_cast<long>(j));
                    changed = true;
                    break;
                }
            }
        }
    }
}

double max_radius(const TaggedPoly& poly, const Vec2& p) {
    double r = 0.0;
    for (const auto& v : poly.v) r = std::max(r, (v - p).norm());
    return r;
}

// Uniform-grid bins for nearest-candidate sweeps.
struct PointGrid {
    double cell = 1.0;
    Vec2 lo;
    int nx = 1, ny = 1;
    std::vector<std::vector<int>> bins;

    PointGrid(const std::vector<Vec2>& pts, double target_cell) {
        Vec2 hi = pts.front();
        lo = pts.front();
        for (const auto& p : pts) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        cell = std::max(target_cell, 1e-300);
        nx = std::max(1, static_cast<int>((hi.x() - lo.x()) / cell) + 1);
        ny = std::max(1, static_cast<int>((hi.y() - lo.y()) / cell) + 1);
        bins.resize(static_cast<std::size_t>(nx) * ny);
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            bins[index(pts[i])].push_back(i);
    }

    std::size_t index(const Vec2& p) const {
        int ix = std::clamp(static_cast<int>((p.x() - lo.x()) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y() - lo.y()) / cell), 0, ny - 1);
        return static_cast<std::size_t>(iy) * nx + ix;
    }

    // bins whose Chebyshev ring index equals k around the bin of p
    void ring(const Vec2& p, int k, std::vector<int>& out) const {
        int cx = std::clamp(static_cast<int>((p.x() - lo.x()) / cell), 0, nx - 1);
        int cy = std::clamp(static_cast<int>((p.y() - lo.y()) / cell), 0, ny - 1);
        for (int iy = cy - k; iy <= cy + k; ++iy) {
            if (iy < 0 || iy >= ny) continue;
            for (int ix = cx - k; ix <= cx + k; ++ix) {
                if (ix < 0 || ix >= nx) continue;
                if (std::max(std::abs(ix - cx), std::abs(iy - cy)) != k) continue;
                const auto& b = bins[static_cast<std::size_t>(iy) * nx + ix];
                out.insert(out.end(), b.begin(), b.end());
            }
        }
    }
};

// Canonical vertex registry: merges vertices closer than `meld`.
struct VertexMerger {
    double meld;
    std::unordered_map<long long, std::vector<int>> grid;
    std::vector<Vec2> verts;

    explicit VertexMerger(double m) : meld(std::max(m, 1e-300)) {}

    long long key(double x, double y) const {
        const long long ix = static_cast<long long>(std::floor(x / meld / 4.0));
        const long long iy = static_cast<long long>(std::floor(y / meld / 4.0));
        return ix * 2000003LL + iy;
    }

    int canonical(const Vec2& p) {
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(key(p.x() + 4.0 * meld * static_cast<double>(dx),
                                        p.y() + 4.0 * meld * static_cast<double>(dy)));
                if (it == grid.end()) continue;
                for (int id : it->second)
                    if ((verts[static_cast<std::size_t>(id)] - p).norm() <= meld) return id;
            }
        }
        const int id = static_cast<int>(verts.size());
        verts.push_back(p);
        grid[key(p.x(), p.y())].push_back(id);
        return id;
    }
};

void check_partition_invariants(const Partition& part) {
    double cell_area = 0.0;
    for (int i = 0; i < part.n_points(); ++i) {
        const double a = polygon_area(part.cells[static_cast<std::size_t>(i)]);
        if (a <= 0.0)
            throw GeometryError("degenerate subdomain for point " + std::to_string(i));
        cell_area += a;
        if (!point_in_polygon(part.cells[static_cast<std::size_t>(i)],
                              part.cloud.pts[static_cast<std::size_t>(i)],
                              1e-9 * part.diameter))
            throw GeometryError("point " + std::to_string(i) +
                                " not contained in its subdomain");
    }
    if (part.domain_area > 0.0 &&
        std::abs(cell_area - part.domain_area) > 1e-10 * part.domain_area)
        throw GeometryError("subdomains do not tile the domain: cells " +
                            std::to_string(cell_area) + " vs domain " +
                            std::to_string(part.domain_area));
}

void build_incidence(Partition& part) {
    part.cell_internal.assign(static_cast<std::size_t>(part.n_points()), {});
    part.cell_external.assign(static_cast<std::size_t>(part.n_points()), {});
    for (int s = 0; s < static_cast<int>(part.internal.size()); ++s) {
        part.cell_internal[static_cast<std::size_t>(part.internal[static_cast<std::size_t>(s)].left)].push_back(s);
        part.cell_internal[static_cast<std::size_t>(part.internal[static_cast<std::size_t>(s)].right)].push_back(s);
    }
    for (int s = 0; s < static_cast<int>(part.external.size()); ++s)
        part.cell_external[static_cast<std::size_t>(part.external[static_cast<std::size_t>(s)].cell)].push_back(s);
    part.vertex_internal.assign(part.vertices.size(), {});
    for (int s = 0; s < static_cast<int>(part.internal.size()); ++s) {
        const auto& seg = part.internal[static_cast<std::size_t>(s)];
        part.vertex_internal[static_cast<std::size_t>(seg.va)].push_back(s);
        part.vertex_internal[static_cast<std::size_t>(seg.vb)].push_back(s);
    }
}

} // namespace

Partition build_voronoi_partition(const PointCloud& cloud, const Domain& domain) {
    const int n = cloud.size();
    if (n < 1) throw GeometryError("empty point cloud");
    if (domain.poly.size() < 3) throw GeometryError("invalid domain polygon");

    const double diam = polygon_diameter(domain.poly);
    const double meld = 1e-12 * diam;

    for (int i = 0; i < n; ++i) {
        if (!point_in_polygon(domain.poly, cloud.pts[static_cast<std::size_t>(i)], 1e-9 * diam))
            throw GeometryError("point " + std::to_string(i) + " lies outside the domain");
    }
    {
        // duplicate detection via sorted sweep
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const Vec2& pa = cloud.pts[static_cast<std::size_t>(a)];
            const Vec2& pb = cloud.pts[static_cast<std::size_t>(b)];
            return pa.x() != pb.x() ? pa.x() < pb.x() : pa.y() < pb.y();
        });
        for (int i = 0; i + 1 < n; ++i) {
            const Vec2& a = cloud.pts[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            for (int j = i + 1; j < n; ++j) {
                const Vec2& b = cloud.pts[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
                if (b.x() - a.x() > meld) break;
                if ((b - a).norm() <= meld) {
                    std::ostringstream os;
                    os << "duplicate points " << order[static_cast<std::size_t>(i)] << " and "
                       << order[static_cast<std::size_t>(j)];
                    throw GeometryError(os.str());
                }
            }
        }
    }

    const double spacing = diam / std::sqrt(static_cast<double>(std::max(n, 1)));
    PointGrid grid(cloud.pts, spacing);

    TaggedPoly base;
    base.v = domain.poly;
    base.tag.resize(domain.poly.size());
    for (std::size_t e = 0; e < domain.poly.size(); ++e)
        base.tag[e] = EdgeTag{static_cast<int>(e), -1};

    std::vector<TaggedPoly> cells(static_cast<std::size_t>(n));
    std::vector<int> cand;
    for (int i = 0; i < n; ++i) {
        const Vec2& pi = cloud.pts[static_cast<std::size_t>(i)];
        TaggedPoly cell = base;
        double rmax = max_radius(cell, pi);
        // sweep candidates ring by ring, nearest first; a generator farther
        // than 2*rmax cannot cut the remaining cell
        const int max_ring = grid.nx + grid.ny + 2;
        for (int k = 0; k <= max_ring; ++k) {
            if (k > 0 && grid.cell * static_cast<double>(k - 1) > 2.0 * rmax) break;
            cand.clear();
            grid.ring(pi, k, cand);
            std::sort(cand.begin(), cand.end(), [&](int a, int b) {
                const double da = (cloud.pts[static_cast<std::size_t>(a)] - pi).squaredNorm();
                const double db = (cloud.pts[static_cast<std::size_t>(b)] - pi).squaredNorm();
                return da != db ? da < db : a < b;
            });
            for (int j : cand) {
                if (j == i) continue;
                const Vec2& pj = cloud.pts[static_cast<std::size_t>(j)];
                const double d = (pj - pi).norm();
                if (d > 2.0 * rmax) break;
                const Vec2 mid = 0.5 * (pi + pj);
                const Vec2 dir = (pj - pi) / d;
                clip_halfplane(cell, mid, dir, j, meld);
                if (cell.v.empty())
                    throw GeometryError("Voronoi cell of point " + std::to_string(i) +
                                        " vanished (points too close?)");
                rmax = max_radius(cell, pi);
            }
        }
        tidy_poly(cell, meld);
        if (cell.v.size() < 3)
            throw GeometryError("Voronoi cell of point " + std::to_string(i) + " degenerated");
        cells[static_cast<std::size_t>(i)] = std::move(cell);
    }

    // canonicalize vertices so shared edges match exactly between cells
    VertexMerger merger(meld);
    std::vector<std::vector<int>> cell_vids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& cell = cells[static_cast<std::size_t>(i)];
        auto& vids = cell_vids[static_cast<std::size_t>(i)];
        vids.resize(cell.v.size());
        for (std::size_t k = 0; k < cell.v.size(); ++k) {
            vids[k] = merger.canonical(cell.v[k]);
            cell.v[k] = merger.verts[static_cast<std::size_t>(vids[k])];
        }
        tidy_poly(cell, 0.0);   // canonical snapping may have collapsed edges
        vids.clear();
        for (std::size_t k = 0; k < cell.v.size(); ++k)
            vids.push_back(merger.canonical(cell.v[k]));
    }

    Partition part;
    part.cloud = cloud;
    part.cloud.on_boundary.resize(static_cast<std::size_t>(n), false);
    part.bcs = domain.edge_bcs;
    part.domain_area = polygon_area(domain.poly);
    part.diameter = diam;
    part.cells.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) part.cells[static_cast<std::size_t>(i)] = cells[static_cast<std::size_t>(i)].v;

    // collect half-edges per unordered generator pair
    struct HalfEdge {
        int cell;
        int va, vb;
    };
    std::map<std::pair<int, int>, std::vector<HalfEdge>> pair_edges;
    for (int i = 0; i < n; ++i) {
        const auto& cell = cells[static_cast<std::size_t>(i)];
        const auto& vids = cell_vids[static_cast<std::size_t>(i)];
        for (std::size_t k = 0; k < cell.v.size(); ++k) {
            const std::size_t k2 = (k + 1) % cell.v.size();
            const EdgeTag& t = cell.tag[k];
            if (t.neighbor >= 0) {
                const int j = t.neighbor;
                pair_edges[{std::min(i, j), std::max(i, j)}].push_back(
                    HalfEdge{i, vids[k], vids[k2]});
            } else if (t.domain_edge >= 0) {
                ExternalSegment es;
                es.cell = i;
                es.a = cell.v[k];
                es.b = cell.v[k2];
                es.length = (es.b - es.a).norm();
                const Vec2 d = (es.b - es.a) / es.length;
                es.normal = Vec2(d.y(), -d.x());   // outward for CCW polygons
                es.bc = t.domain_edge;
                part.external.push_back(es);
            }
        }
    }

    for (auto& [pr, halves] : pair_edges) {
        // merge the two sides; they must agree as canonical vertex pairs
        std::set<std::pair<int, int>> keys;
        for (const auto& h : halves)
            keys.insert({std::min(h.va, h.vb), std::max(h.va, h.vb)});
        for (const auto& [va, vb] : keys) {
            if (va == vb) continue;
            int count = 0;
            for (const auto& h : halves)
                if (std::min(h.va, h.vb) == va && std::max(h.va, h.vb) == vb) ++count;
            if (count != 2) {
                std::ostringstream os;
                os << "inconsistent shared edge between points " << pr.first << " and "
                   << pr.second << ": halves";
                for (const auto& h : halves)
                    os << " (cell " << h.cell << ": v" << h.va << "-v" << h.vb << ")";
                throw GeometryError(os.str());
            }
            InternalSegment seg;
            seg.left = pr.first;
            seg.right = pr.second;
            seg.va = va;
            seg.vb = vb;
            seg.a = merger.verts[static_cast<std::size_t>(va)];
            seg.b = merger.verts[static_cast<std::size_t>(vb)];
            seg.length = (seg.b - seg.a).norm();
            seg.normal = (cloud.pts[static_cast<std::size_t>(seg.right)] -
                          cloud.pts[static_cast<std::size_t>(seg.left)])
                             .normalized();
            part.internal.push_back(seg);
        }
    }

    part.vertices = merger.verts;

    // boundary flags: point sits on some domain edge
    for (int i = 0; i < n; ++i) {
        const Vec2& p = cloud.pts[static_cast<std::size_t>(i)];
        for (std::size_t e = 0; e < domain.poly.size(); ++e) {
            const Vec2& a = domain.poly[e];
            const Vec2& b = domain.poly[(e + 1) % domain.poly.size()];
            if (point_segment_distance(p, a, b) <= 1e-9 * diam) {
                part.cloud.on_boundary[static_cast<std::size_t>(i)] = true;
                break;
            }
        }
    }

    build_incidence(part);
    check_partition_invariants(part);
    return part;
}

Partition partition_from_mesh(const MeshInput& mesh) {
    const int ne = static_cast<int>(mesh.elements.size());
    if (ne < 1) throw MeshError("mesh has no elements");

    Polygon allpts = mesh.nodes;
    if (allpts.empty()) throw MeshError("mesh has no nodes");
    const double diam = polygon_diameter(allpts);

    Partition part;
    part.bcs = mesh.bcs;
    part.diameter = diam;
    part.cells.resize(static_cast<std::size_t>(ne));

    std::vector<Polygon> polys(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
        const auto& elem = mesh.elements[static_cast<std::size_t>(e)];
        if (elem.size() < 3) throw MeshError("element " + std::to_string(e) + " has < 3 nodes");
        Polygon poly;
        for (int nid : elem) {
            if (nid < 0 || nid >= static_cast<int>(mesh.nodes.size()))
                throw MeshError("element " + std::to_string(e) + " references bad node");
            poly.push_back(mesh.nodes[static_cast<std::size_t>(nid)]);
        }
        double a = polygon_area(poly);
        if (a < 0.0) {
            std::reverse(poly.begin(), poly.end());
            a = -a;
        }
        if (a < 1e-14 * diam * diam)
            throw MeshError("element " + std::to_string(e) + " is degenerate (zero area)");
        polys[static_cast<std::size_t>(e)] = poly;
        part.cells[static_cast<std::size_t>(e)] = poly;
    }

    // edge map: sorted node pair -> (element, local edge) occurrences
    struct Occurrence {
        int elem;
        int na, nb;   // CCW order within the element
    };
    std::map<std::pair<int, int>, std::vector<Occurrence>> edges;
    std::vector<std::vector<int>> ccw(static_cast<std::size_t>(ne));
    for (int e = 0; e < ne; ++e) {
        std::vector<int> conn = mesh.elements[static_cast<std::size_t>(e)];
        Polygon raw;
        for (int nid : conn) raw.push_back(mesh.nodes[static_cast<std::size_t>(nid)]);
        if (polygon_area(raw) < 0.0) std::reverse(conn.begin(), conn.end());
        ccw[static_cast<std::size_t>(e)] = conn;
        const std::size_t m = conn.size();
        for (std::size_t k = 0; k < m; ++k) {
            const int na = conn[k];
            const int nb = conn[(k + 1) % m];
            edges[{std::min(na, nb), std::max(na, nb)}].push_back(Occurrence{e, na, nb});
        }
    }

    std::map<std::pair<int, int>, int> tag_of_edge;
    for (const auto& [pair, bc] : mesh.tagged_edges) {
        auto key = std::make_pair(std::min(pair[0], pair[1]), std::max(pair[0], pair[1]));
        tag_of_edge[key] = bc;
    }

    std::vector<std::pair<int, int>> boundary_edges;
    for (const auto& [key, occ] : edges) {
        if (occ.size() > 2)
            throw MeshError("non-conforming mesh: edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") shared by " +
                            std::to_string(occ.size()) + " elements");
        if (occ.size() == 1) boundary_edges.push_back(key);
    }
    // hanging-node scan on the boundary: a node strictly inside a boundary edge
    for (const auto& [na, nb] : boundary_edges) {
        const Vec2& a = mesh.nodes[static_cast<std::size_t>(na)];
        const Vec2& b = mesh.nodes[static_cast<std::size_t>(nb)];
        for (int v = 0; v < static_cast<int>(mesh.nodes.size()); ++v) {
            if (v == na || v == nb) continue;
            const Vec2& p = mesh.nodes[static_cast<std::size_t>(v)];
            if (point_segment_distance(p, a, b) < 1e-9 * diam &&
                (p - a).norm() > 1e-9 * diam && (p - b).norm() > 1e-9 * diam)
                throw MeshError("non-conforming mesh: node " + std::to_string(v) +
                                " hangs on edge (" + std::to_string(na) + "," +
                                std::to_string(nb) + ")");
        }
    }

    // interpolation points: centroid, or midpoint of the longest tagged
    // boundary edge for boundary elements
    part.cloud.pts.resize(static_cast<std::size_t>(ne));
    part.cloud.on_boundary.assign(static_cast<std::size_t>(ne), false);
    for (int e = 0; e < ne; ++e) {
        const auto& conn = ccw[static_cast<std::size_t>(e)];
        const std::size_t m = conn.size();
        double best_len = -1.0;
        Vec2 best_mid(0, 0);
        for (std::size_t k = 0; k < m; ++k) {
            const int na = conn[k];
            const int nb = conn[(k + 1) % m];
            auto key = std::make_pair(std::min(na, nb), std::max(na, nb));
            if (edges[key].size() != 1) continue;   // internal edge
            auto it = tag_of_edge.find(key);
            if (it == tag_of_edge.end()) continue;  // untagged (free) boundary
            const auto& bc = mesh.bcs[static_cast<std::size_t>(it->second)];
            if (bc.kind == BcKind::Free) continue;
            const Vec2& a = mesh.nodes[static_cast<std::size_t>(na)];
            const Vec2& b = mesh.nodes[static_cast<std::size_t>(nb)];
            const double len = (b - a).norm();
            if (len > best_len) {
                best_len = len;
                best_mid = 0.5 * (a + b);
            }
        }
        if (best_len > 0.0) {
            part.cloud.pts[static_cast<std::size_t>(e)] = best_mid;
            part.cloud.on_boundary[static_cast<std::size_t>(e)] = true;
        } else {
            part.cloud.pts[static_cast<std::size_t>(e)] = polygon_centroid(polys[static_cast<std::size_t>(e)]);
        }
    }

    // segments; canonical vertices are the mesh nodes themselves
    double total_area = 0.0;
    for (int e = 0; e < ne; ++e) total_area += polygon_area(polys[static_cast<std::size_t>(e)]);
    part.domain_area = total_area;
    part.vertices = mesh.nodes;

    for (const auto& [key, occ] : edges) {
        const Vec2& a = mesh.nodes[static_cast<std::size_t>(key.first)];
        const Vec2& b = mesh.nodes[static_cast<std::size_t>(key.second)];
        const double len = (b - a).norm();
        if (occ.size() == 2) {
            if (tag_of_edge.count(key))
                throw MeshError("BC tag on internal edge (" + std::to_string(key.first) + "," +
                                std::to_string(key.second) + ")");
            InternalSegment seg;
            seg.left = std::min(occ[0].elem, occ[1].elem);
            seg.right = std::max(occ[0].elem, occ[1].elem);
            seg.va = key.first;
            seg.vb = key.second;
            seg.a = a;
            seg.b = b;
            seg.length = len;
            Vec2 nrm((b - a).y(), -(b - a).x());
            nrm.normalize();
            const Vec2 cl = polygon_centroid(polys[static_cast<std::size_t>(seg.left)]);
            const Vec2 cr = polygon_centroid(polys[static_cast<std::size_t>(seg.right)]);
            if (nrm.dot(cr - cl) < 0.0) nrm = -nrm;
            seg.normal = nrm;
            part.internal.push_back(seg);
        } else {
            ExternalSegment es;
            es.cell = occ[0].elem;
            // orient boundary edges CCW as stored in the owning element
            es.a = mesh.nodes[static_cast<std::size_t>(occ[0].na)];
            es.b = mesh.nodes[static_cast<std::size_t>(occ[0].nb)];
            es.length = len;
            const Vec2 d = (es.b - es.a) / len;
            es.normal = Vec2(d.y(), -d.x());
            auto it = tag_of_edge.find(key);
            es.bc = it == tag_of_edge.end() ? -1 : it->second;
            part.external.push_back(es);
        }
    }

    build_incidence(part);
    check_partition_invariants(part);
    return part;
}

Support neighbor_support(const Partition& partition,
                         const std::vector<std::uint8_t>& released,
                         int point, int rings) {
    if (point < 0 || point >= partition.n_points())
        throw GeometryError("neighbor_support: invalid point id");
    if (rings != 1 && rings != 2)
        throw GeometryError("neighbor_support: rings must be 1 or 2");

    auto ring1 = [&](int p, std::vector<int>& out) {
        out.clear();
        for (int s : partition.cell_internal[static_cast<std::size_t>(p)]) {
            if (!released.empty() && released[static_cast<std::size_t>(s)]) continue;
            out.push_back(partition.other_side(s, p));
        }
    };

    std::vector<int> first;
    ring1(point, first);
    std::set<int> result(first.begin(), first.end());
    if (rings == 2) {
        std::vector<int> second;
        for (int p : first) {
            ring1(p, second);
            result.insert(second.begin(), second.end());
        }
        result.erase(point);
    }

    Support s;
    s.rings = rings;
    s.ids.assign(result.begin(), result.end());
    return s;
}

} // namespace fpm
