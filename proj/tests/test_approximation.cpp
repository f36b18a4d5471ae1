#include "doctest.h"

#include "fpm/approximation.hpp"
#include "fpm/benchmarks.hpp"
#include "fpm/errors.hpp"

#include <cmath>

using namespace fpm;

namespace {

PointCloud cloud_of(std::vector<Vec2> pts) {
    PointCloud c;
    c.pts = std::move(pts);
    c.on_boundary.assign(c.pts.size(), false);
    return c;
}

Support support_of(std::vector<int> ids) {
    Support s;
    s.ids = std::move(ids);
    return s;
}

// stacked u_E for a scalar field applied to u1 (u2 = 0)
Eigen::VectorXd sample_u1(const PointCloud& cloud, const RecoveryMatrix& rec,
                          const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd ue = Eigen::VectorXd::Zero(2 * rec.n_points());
    for (int i = 0; i < rec.n_points(); ++i)
        ue(2 * i) = f(cloud.pts[static_cast<std::size_t>(rec.points[static_cast<std::size_t>(i)])]);
    return ue;
}

} // namespace

TEST_CASE("elasticity matrix values") {
    SUBCASE("nu = 0 plane stress is diagonal") {
        auto D = elasticity_matrix({1.0, 0.0, PlaneState::Stress});
        CHECK(D(0, 0) == doctest::Approx(1.0));
        CHECK(D(1, 1) == doctest::Approx(1.0));
        CHECK(D(2, 2) == doctest::Approx(0.5));
        CHECK(D(0, 1) == doctest::Approx(0.0));
    }
    SUBCASE("nu = 0.3 plane stress") {
        auto D = elasticity_matrix({1.0, 0.3, PlaneState::Stress});
        CHECK(D(0, 0) == doctest::Approx(1.0 / 0.91).epsilon(1e-9));
        CHECK(D(0, 1) == doctest::Approx(0.3 / 0.91).epsilon(1e-9));
        CHECK(D(2, 2) == doctest::Approx(0.35 / 0.91).epsilon(1e-9));
    }
    SUBCASE("plane strain effective constants") {
        MaterialModel m{1.0, 0.3, PlaneState::Strain};
        CHECK(m.Ebar() == doctest::Approx(1.0 / 0.91).epsilon(1e-9));
        CHECK(m.nubar() == doctest::Approx(3.0 / 7.0).epsilon(1e-9));
    }
    SUBCASE("invalid ratios rejected") {
        CHECK_THROWS_AS(elasticity_matrix({1.0, 0.5, PlaneState::Stress}), Error);
        CHECK_NOTHROW(elasticity_matrix({1.0, 0.4999, PlaneState::Stress}));
    }
}

TEST_CASE("gfd recovery is exact on linear fields") {
    auto cloud = cloud_of({{0, 0}, {1, 0}, {0, 1}});
    auto rec = gfd_recovery(cloud, support_of({1, 2}), 0, 1);
    auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return 2 * x.x() + 3 * x.y(); });
    Eigen::VectorXd a = rec.C * ue;
    CHECK(a(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(a(2) == doctest::Approx(0.0));   // u2 derivatives
    CHECK(a(3) == doctest::Approx(0.0));
}

TEST_CASE("gfd quadratic recovery reproduces x^2") {
    auto cloud = cloud_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {-1, 0}, {0, -1}});
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3, 4, 5}), 0, 2);
    auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return x.x() * x.x(); });
    Eigen::VectorXd a = rec.C * ue;
    // layout (d1, d2, d11, d22, d12): basis carries the 1/2 on squares
    CHECK(a(0) == doctest::Approx(0.0));
    CHECK(a(1) == doctest::Approx(0.0));
    CHECK(a(2) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(a(3) == doctest::Approx(0.0));
    CHECK(a(4) == doctest::Approx(0.0));
}

TEST_CASE("gfd rejects collinear supports with a condition estimate") {
    auto cloud = cloud_of({{0, 0}, {1, 0}, {2, 0}});
    CHECK_THROWS_AS(gfd_recovery(cloud, support_of({1, 2}), 0, 1), RecoveryError);
}

TEST_CASE("two-point fallback matches the directional difference") {
    SUBCASE("neighbor along x") {
        auto cloud = cloud_of({{0, 0}, {1, 0}});
        auto rec = two_point_fallback(cloud, 0, 1, 1);
        auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return 5.0 * x.x(); });
        Eigen::VectorXd a = rec.C * ue;
        CHECK(a(0) == doctest::Approx(5.0));
        CHECK(a(1) == doctest::Approx(0.0));
    }
    SUBCASE("neighbor along y with length 2") {
        auto cloud = cloud_of({{0, 0}, {0, 2}});
        auto rec = two_point_fallback(cloud, 0, 1, 1);
        auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return 2.0 * x.y(); });
        Eigen::VectorXd a = rec.C * ue;
        CHECK(a(0) == doctest::Approx(0.0));
        CHECK(a(1) == doctest::Approx(2.0));
    }
    SUBCASE("oblique neighbor (3,4), samples 0 and 25") {
        auto cloud = cloud_of({{0, 0}, {3, 4}});
        auto rec = two_point_fallback(cloud, 0, 1, 1);
        Eigen::VectorXd ue = Eigen::VectorXd::Zero(4);
        ue(2) = 25.0;
        Eigen::VectorXd a = rec.C * ue;
        CHECK(a(0) == doctest::Approx(3.0));
        CHECK(a(1) == doctest::Approx(4.0));
    }
}

TEST_CASE("csrbf kernel endpoints and midpoint") {
    CHECK(csrbf_kernel(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(csrbf_kernel(2.0, 2.0) == doctest::Approx(0.0));
    CHECK(csrbf_kernel(1.0, 2.0) == doctest::Approx(0.3125));
}

TEST_CASE("csrbf recovery reproduces linear fields") {
    auto cloud = cloud_of({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
    auto rec = csrbf_recovery(cloud, support_of({1, 2, 3}), 0, 1, 3.0);
    auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return 7.0 - 2.0 * x.x() + 5.0 * x.y(); });
    Eigen::VectorXd a = rec.C * ue;
    CHECK(a(0) == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(a(1) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("csrbf rejects a radius smaller than the farthest support") {
    auto cloud = cloud_of({{0, 0}, {1, 0}, {0, 1}, {2, 2}});
    CHECK_THROWS_WITH_AS(csrbf_recovery(cloud, support_of({1, 2, 3}), 0, 1, 1.5),
                         doctest::Contains("annihilated"), RecoveryError);
}

TEST_CASE("shape matrices select own DoFs at the point") {
    auto cloud = cloud_of({{0.3, 0.4}, {1, 0}, {0, 1}, {1, 1}});
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3}), 0, 1);
    auto shapes = shape_matrices(rec, cloud.pts[0]);
    Eigen::MatrixXd N0 = shapes.N(cloud.pts[0]);
    CHECK(N0(0, 0) == doctest::Approx(1.0));
    CHECK(N0(1, 1) == doctest::Approx(1.0));
    for (int c = 2; c < N0.cols(); ++c) {
        CHECK(N0(0, c) == doctest::Approx(0.0));
        CHECK(N0(1, c) == doctest::Approx(0.0));
    }
}

TEST_CASE("rigid motions produce zero strain") {
    auto cloud = cloud_of({{0.2, 0.3}, {1, 0}, {0, 1}, {1, 1}, {-0.5, 0.4}});
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3, 4}), 0, 1);
    auto shapes = shape_matrices(rec, cloud.pts[0]);

    SUBCASE("translation") {
        Eigen::VectorXd ue(2 * rec.n_points());
        for (int i = 0; i < rec.n_points(); ++i) {
            ue(2 * i) = 3.5;
            ue(2 * i + 1) = -1.25;
        }
        Eigen::Vector3d eps = shapes.B0 * ue;
        CHECK(eps.norm() < 1e-12);
    }
    SUBCASE("rotation") {
        const double omega = 0.7;
        Eigen::VectorXd ue(2 * rec.n_points());
        for (int i = 0; i < rec.n_points(); ++i) {
            const Vec2& x = cloud.pts[static_cast<std::size_t>(rec.points[static_cast<std::size_t>(i)])];
            ue(2 * i) = -omega * x.y();
            ue(2 * i + 1) = omega * x.x();
        }
        Eigen::Vector3d eps = shapes.B0 * ue;
        CHECK(eps.norm() < 1e-10);
    }
}

TEST_CASE("polynomial reproduction property for both backends") {
    SplitMix64 rng(4242);
    std::vector<Vec2> pts{{0, 0}};
    for (int i = 0; i < 9; ++i)
        pts.emplace_back(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    auto cloud = cloud_of(pts);
    Support sup = support_of({1, 2, 3, 4, 5, 6, 7, 8, 9});

    auto check_linear = [&](const RecoveryMatrix& rec) {
        auto ue = sample_u1(cloud, rec, [](const Vec2& x) { return 1.7 - 0.6 * x.x() + 2.2 * x.y(); });
        Eigen::VectorXd a = rec.C * ue;
        CHECK(a(0) == doctest::Approx(-0.6).epsilon(1e-10));
        CHECK(a(1) == doctest::Approx(2.2).epsilon(1e-10));
    };
    auto check_quadratic = [&](const RecoveryMatrix& rec) {
        auto f = [](const Vec2& x) {
            return 0.5 + x.x() - 2.0 * x.y() + 1.5 * x.x() * x.x() - 0.5 * x.y() * x.y() +
                   0.8 * x.x() * x.y();
        };
        auto ue = sample_u1(cloud, rec, f);
        Eigen::VectorXd a = rec.C * ue;
        CHECK(a(0) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(a(1) == doctest::Approx(-2.0).epsilon(1e-9));
        CHECK(a(2) == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(a(3) == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(a(4) == doctest::Approx(0.8).epsilon(1e-9));
    };

    check_linear(gfd_recovery(cloud, sup, 0, 1));
    check_quadratic(gfd_recovery(cloud, sup, 0, 2));
    check_linear(csrbf_recovery(cloud, sup, 0, 1, 3.0));
    check_quadratic(csrbf_recovery(cloud, sup, 0, 2, 3.0));
}

TEST_CASE("constant-field annihilation") {
    SplitMix64 rng(11);
    std::vector<Vec2> pts{{0.1, -0.2}};
    for (int i = 0; i < 6; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    auto cloud = cloud_of(pts);
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3, 4, 5, 6}), 0, 2);
    auto ue = sample_u1(cloud, rec, [](const Vec2&) { return 42.0; });
    CHECK((rec.C * ue).norm() < 1e-10);
}

TEST_CASE("partition of unity: constants reproduced anywhere") {
    auto cloud = cloud_of({{0.2, 0.3}, {1.1, 0}, {0, 0.9}, {1, 1.2}});
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3}), 0, 1);
    auto shapes = shape_matrices(rec, cloud.pts[0]);
    Eigen::VectorXd ue(8);
    for (int i = 0; i < 4; ++i) {
        ue(2 * i) = 1.0;
        ue(2 * i + 1) = 0.0;
    }
    for (const Vec2& x : {Vec2(0.5, 0.5), Vec2(-0.3, 0.8), Vec2(0.2, 0.3)}) {
        Vec2 u = shapes.N(x) * ue;
        CHECK(u.x() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(u.y() == doctest::Approx(0.0));
    }
}

TEST_CASE("B matches finite differences of N for linear trials") {
    auto cloud = cloud_of({{0.2, 0.3}, {1.1, 0}, {0, 0.9}, {1, 1.2}, {-0.6, -0.1}});
    auto rec = gfd_recovery(cloud, support_of({1, 2, 3, 4}), 0, 1);
    auto shapes = shape_matrices(rec, cloud.pts[0]);
    const double h = 1e-6;
    const Vec2 x(0.4, 0.5);
    Eigen::MatrixXd dN_dx = (shapes.N(x + Vec2(h, 0)) - shapes.N(x - Vec2(h, 0))) / (2 * h);
    Eigen::MatrixXd dN_dy = (shapes.N(x + Vec2(0, h)) - shapes.N(x - Vec2(0, h))) / (2 * h);
    for (int c = 0; c < shapes.B0.cols(); ++c) {
        CHECK(shapes.B0(0, c) == doctest::Approx(dN_dx(0, c)).epsilon(1e-5));
        CHECK(shapes.B0(1, c) == doctest::Approx(dN_dy(1, c)).epsilon(1e-5));
        CHECK(shapes.B0(2, c) == doctest::Approx(dN_dy(0, c) + dN_dx(1, c)).epsilon(1e-5));
    }
}
