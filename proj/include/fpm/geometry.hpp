#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fpm {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);   // signed, CCW positive
Vec2 polygon_centroid(const Polygon& poly);
double polygon_diameter(const Polygon& poly);
bool point_in_polygon(const Polygon& poly, const Vec2& p, double boundary_tol);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

enum class BcKind { Free, Traction, Displacement };

// Boundary condition attached to one domain edge. Traction values and
// prescribed displacements are functions of position so analytic benchmark
// fields can be imposed directly; `mask` selects which displacement
// components are constrained (symmetry edges constrain one).
struct BoundaryCondition {
    BcKind kind = BcKind::Free;
    std::function<Vec2(const Vec2&)> value;
    std::array<bool, 2> mask{true, true};
};

BoundaryCondition free_bc();
BoundaryCondition traction_bc(const Vec2& t);
BoundaryCondition traction_bc(std::function<Vec2(const Vec2&)> t);
BoundaryCondition displacement_bc(std::function<Vec2(const Vec2&)> u,
                                  std::array<bool, 2> mask = {true, true});

// Simple polygon with one boundary condition per edge
// (edge i runs from poly[i] to poly[(i+1) % n]).
struct Domain {
    Polygon poly;
    std::vector<BoundaryCondition> edge_bcs;
};

Domain make_domain(Polygon poly, std::vector<BoundaryCondition> edge_bcs);

struct PointCloud {
    std::vector<Vec2> pts;
    std::vector<bool> on_boundary;

    int size() const { return static_cast<int>(pts.size()); }
};

// Internal boundary segment shared by the subdomains of `left` and `right`.
// The unit normal points left -> right; jumps are left minus right.
struct InternalSegment {
    int left = -1;
    int right = -1;
    Vec2 a, b;
    double length = 0.0;
    Vec2 normal;
    int va = -1, vb = -1;   // canonical vertex ids (crack-tip bookkeeping)
};

struct ExternalSegment {
    int cell = -1;
    Vec2 a, b;
    double length = 0.0;
    Vec2 normal;   // outward
    int bc = -1;   // index into Partition::bcs
};

struct Partition {
    PointCloud cloud;
    std::vector<Polygon> cells;
    std::vector<InternalSegment> internal;
    std::vector<ExternalSegment> external;
    std::vector<BoundaryCondition> bcs;
    std::vector<std::vector<int>> cell_internal;   // per cell: incident internal segment ids
    std::vector<std::vector<int>> cell_external;
    std::vector<Vec2> vertices;                    // canonical internal-segment endpoints
    std::vector<std::vector<int>> vertex_internal; // per vertex: incident internal segment ids
    double domain_area = 0.0;
    double diameter = 0.0;

    int n_points() const { return cloud.size(); }
    int other_side(int seg, int cell) const {
        const auto& s = internal[seg];
        return s.left == cell ? s.right : s.left;
    }
};

// Clipped Voronoi diagram of the cloud inside a simple (possibly non-convex)
// polygonal domain. External segments inherit the BC of the domain edge they
// lie on.
Partition build_voronoi_partition(const PointCloud& cloud, const Domain& domain);

// Conforming polygonal mesh converted to a partition: one subdomain per
// element, interior points at centroids, boundary points at the midpoint of
// the longest BC-tagged boundary edge.
struct MeshInput {
    std::vector<Vec2> nodes;
    std::vector<std::vector<int>> elements;
    // (sorted node pair) -> index into bcs; untagged boundary edges are free
    std::vector<std::pair<std::array<int, 2>, int>> tagged_edges;
    std::vector<BoundaryCondition> bcs;
};

Partition partition_from_mesh(const MeshInput& mesh);

struct Support {
    std::vector<int> ids;   // sorted ascending, excludes the point itself
    int rings = 1;
};

// Ring-1 support: points sharing an uncracked internal segment. Ring-2 adds
// the ring-1 supports of ring-1 members. `released` may be empty (no cracks)
// or sized to partition.internal.
Support neighbor_support(const Partition& partition,
                         const std::vector<std::uint8_t>& released,
                         int point, int rings);

} // namespace fpm
