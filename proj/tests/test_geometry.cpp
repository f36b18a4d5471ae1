#include "doctest.h"

#include "fpm/benchmarks.hpp"
#include "fpm/errors.hpp"
#include "fpm/geometry.hpp"

#include <cmath>
#include <set>

using namespace fpm;

namespace {

Domain unit_square_domain() {
    Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return make_domain(sq, {free_bc(), free_bc(), free_bc(), free_bc()});
}

PointCloud cloud_of(std::vector<Vec2> pts) {
    PointCloud c;
    c.pts = std::move(pts);
    c.on_boundary.assign(c.pts.size(), false);
    return c;
}

} // namespace

TEST_CASE("single generator fills the whole domain") {
    auto part = build_voronoi_partition(cloud_of({{0.5, 0.5}}), unit_square_domain());
    CHECK(part.cells.size() == 1);
    CHECK(part.internal.empty());
    CHECK(polygon_area(part.cells[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two generators split along the perpendicular bisector") {
    auto part = build_voronoi_partition(cloud_of({{0.25, 0.5}, {0.75, 0.5}}),
                                        unit_square_domain());
    REQUIRE(part.internal.size() == 1);
    const auto& seg = part.internal[0];
    CHECK(seg.length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(seg.a.x() - 0.5) < 1e-12);
    CHECK(std::abs(seg.b.x() - 0.5) < 1e-12);
    CHECK(seg.normal.x() == doctest::Approx(1.0));
    CHECK(seg.normal.y() == doctest::Approx(0.0));
    CHECK(seg.left == 0);
    CHECK(seg.right == 1);
}

TEST_CASE("random clouds tile the domain") {
    Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto pts = scatter_points(sq, 25, 99);
    auto part = build_voronoi_partition(cloud_of(pts), unit_square_domain());
    CHECK(part.cells.size() == 25);
    // shoelace oracle over all cells
    double total = 0.0;
    for (const auto& cell : part.cells) total += polygon_area(cell);
    CHECK(std::abs(total - 1.0) < 1e-10);
}

TEST_CASE("duplicate and outside points are rejected with ids") {
    CHECK_THROWS_WITH_AS(
        build_voronoi_partition(cloud_of({{0.5, 0.5}, {0.5, 0.5}}), unit_square_domain()),
        doctest::Contains("duplicate"), GeometryError);
    CHECK_THROWS_WITH_AS(
        build_voronoi_partition(cloud_of({{0.5, 0.5}, {2.5, 0.5}}), unit_square_domain()),
        doctest::Contains("outside"), GeometryError);
}

TEST_CASE("internal segments appear in both adjacent cell boundaries") {
    auto pts = grid_points({0, 0}, {1, 1}, 4, 4);
    auto part = build_voronoi_partition(cloud_of(pts), unit_square_domain());
    for (const auto& seg : part.internal) {
        for (int side : {seg.left, seg.right}) {
            const Polygon& cell = part.cells[static_cast<std::size_t>(side)];
            bool a_on = false, b_on = false;
            for (std::size_t k = 0; k < cell.size(); ++k) {
                const Vec2& p = cell[k];
                const Vec2& q = cell[(k + 1) % cell.size()];
                if (point_segment_distance(seg.a, p, q) < 1e-10) a_on = true;
                if (point_segment_distance(seg.b, p, q) < 1e-10) b_on = true;
            }
            CHECK(a_on);
            CHECK(b_on);
        }
    }
}

TEST_CASE("regular grid partition has the expected adjacency") {
    auto pts = grid_points({0, 0}, {1, 1}, 3, 3);
    auto part = build_voronoi_partition(cloud_of(pts), unit_square_domain());
    CHECK(part.cells.size() == 9);
    CHECK(part.internal.size() == 12);   // 2 per row/column pair

    // center point 4: ring-1 = 4-neighborhood, ring-2 = all 8 others
    auto s1 = neighbor_support(part, {}, 4, 1);
    CHECK(s1.ids == std::vector<int>{1, 3, 5, 7});
    auto s2 = neighbor_support(part, {}, 4, 2);
    CHECK(s2.ids == std::vector<int>{0, 1, 2, 3, 5, 6, 7, 8});
}

TEST_CASE("support symmetry on uncracked partitions") {
    Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto pts = scatter_points(sq, 30, 7);
    auto part = build_voronoi_partition(cloud_of(pts), unit_square_domain());
    for (int i = 0; i < part.n_points(); ++i) {
        auto si = neighbor_support(part, {}, i, 1);
        for (int j : si.ids) {
            auto sj = neighbor_support(part, {}, j, 1);
            CHECK(std::find(sj.ids.begin(), sj.ids.end(), i) != sj.ids.end());
        }
    }
}

TEST_CASE("released segments never contribute adjacency") {
    auto pts = grid_points({0, 0}, {1, 1}, 3, 3);
    auto part = build_voronoi_partition(cloud_of(pts), unit_square_domain());
    // release the segment between center (4) and east neighbor (5)
    std::vector<std::uint8_t> released(part.internal.size(), 0);
    for (int s = 0; s < static_cast<int>(part.internal.size()); ++s) {
        const auto& seg = part.internal[static_cast<std::size_t>(s)];
        if ((seg.left == 4 && seg.right == 5) || (seg.left == 5 && seg.right == 4))
            released[static_cast<std::size_t>(s)] = 1;
    }
    auto s1 = neighbor_support(part, released, 4, 1);
    CHECK(s1.ids == std::vector<int>{1, 3, 7});
    auto s2 = neighbor_support(part, released, 4, 2);
    // 5 sits across the crack: two rings of uncracked adjacency cannot reach it
    CHECK(s2.ids == std::vector<int>{0, 1, 2, 3, 6, 7, 8});
}

TEST_CASE("mesh partition: single quad, centroid vs tagged-edge placement") {
    MeshInput mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2, 3}};
    SUBCASE("no BC tags -> centroid") {
        auto part = partition_from_mesh(mesh);
        CHECK(part.cloud.pts[0].x() == doctest::Approx(0.5));
        CHECK(part.cloud.pts[0].y() == doctest::Approx(0.5));
        CHECK(part.internal.empty());
        CHECK(part.external.size() == 4);
    }
    SUBCASE("bottom edge tagged -> edge midpoint") {
        mesh.bcs = {displacement_bc([](const Vec2&) { return Vec2(0, 0); })};
        mesh.tagged_edges = {{{0, 1}, 0}};
        auto part = partition_from_mesh(mesh);
        CHECK(part.cloud.pts[0].x() == doctest::Approx(0.5));
        CHECK(part.cloud.pts[0].y() == doctest::Approx(0.0));
        CHECK(part.cloud.on_boundary[0]);
    }
}

TEST_CASE("mesh partition: 2x2 grid of quads") {
    MeshInput mesh;
    for (int j = 0; j <= 2; ++j)
        for (int i = 0; i <= 2; ++i) mesh.nodes.emplace_back(i, j);
    auto nid = [](int i, int j) { return 3 * j + i; };
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i)
            mesh.elements.push_back({nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)});
    auto part = partition_from_mesh(mesh);
    CHECK(part.cells.size() == 4);
    CHECK(part.internal.size() == 4);
    CHECK(part.domain_area == doctest::Approx(4.0));
}

TEST_CASE("mesh partition: two triangles share the diagonal") {
    MeshInput mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2}, {0, 2, 3}};
    auto part = partition_from_mesh(mesh);
    CHECK(part.cells.size() == 2);
    REQUIRE(part.internal.size() == 1);
    CHECK(part.internal[0].length == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mesh partition rejects bad meshes") {
    MeshInput mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2}, {0, 2, 3}, {0, 1, 2}};
    CHECK_THROWS_AS(partition_from_mesh(mesh), MeshError);

    MeshInput degen;
    degen.nodes = {{0, 0}, {1, 0}, {2, 0}};
    degen.elements = {{0, 1, 2}};
    CHECK_THROWS_WITH_AS(partition_from_mesh(degen), doctest::Contains("degenerate"), MeshError);
}

TEST_CASE("non-convex domain: L-shape tiles correctly") {
    const double s = 0.5;
    Polygon L = {{s, 0}, {2, 0}, {2, 2}, {0, 2}, {0, s}, {s, s}};
    Domain dom = make_domain(L, std::vector<BoundaryCondition>(6, free_bc()));
    std::vector<Vec2> pts;
    for (const Vec2& p : grid_points({0, 0}, {2, 2}, 9, 9))
        if (!(p.x() < s - 1e-12 && p.y() < s - 1e-12)) pts.push_back(p);
    auto part = build_voronoi_partition(cloud_of(pts), dom);
    double total = 0.0;
    for (const auto& cell : part.cells) total += polygon_area(cell);
    CHECK(std::abs(total - (4.0 - s * s)) < 1e-10 * 4.0);
}

TEST_CASE("external segments inherit domain edge BCs") {
    Polygon sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    Domain dom = make_domain(
        sq, {traction_bc(Vec2(0, -1)), free_bc(), traction_bc(Vec2(0, 1)), free_bc()});
    auto pts = grid_points({0, 0}, {1, 1}, 3, 3);
    auto part = build_voronoi_partition(cloud_of(pts), dom);
    int bottom = 0, top = 0;
    for (const auto& es : part.external) {
        if (es.bc < 0) continue;
        const auto& bc = part.bcs[static_cast<std::size_t>(es.bc)];
        if (bc.kind != BcKind::Traction) continue;
        if (std::abs(es.a.y()) < 1e-12 && std::abs(es.b.y()) < 1e-12) ++bottom;
        if (std::abs(es.a.y() - 1) < 1e-12 && std::abs(es.b.y() - 1) < 1e-12) ++top;
    }
    CHECK(bottom == 3);
    CHECK(top == 3);
}
