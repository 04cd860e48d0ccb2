#include <gtest/gtest.h>

#include "xfd/fem.hpp"

#include <random>
#include <set>

using namespace xfd;

namespace {

const std::array<Vec2, 6> kRefNodes{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(0.5, 0), Vec2(0.5, 0.5), Vec2(0, 0.5)};

} // namespace

class Basis : public ::testing::TestWithParam<int> {};

TEST_P(Basis, KroneckerAndPartitionOfUnity) {
    const int deg = GetParam();
    const int n = deg == 1 ? 3 : 6;
    for (int i = 0; i < n; ++i) {
        const auto b = reference_basis(deg, kRefNodes[i]);
        ASSERT_EQ(b.n, n);
        for (int j = 0; j < n; ++j) EXPECT_NEAR(b.values[j], i == j ? 1.0 : 0.0, 1e-15);
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 30; ++k) {
        double xi = u(rng), eta = u(rng);
        if (xi + eta > 1) xi = 1 - xi, eta = 1 - eta;
        const auto b = reference_basis(deg, {xi, eta});
        double s = 0;
        Vec2 g = Vec2::Zero();
        for (int j = 0; j < n; ++j) s += b.values[j], g += b.grads[j];
        EXPECT_NEAR(s, 1.0, 1e-14);
        EXPECT_LT(g.norm(), 1e-13);
        const double e = 1e-6;
        for (int j = 0; j < n; ++j) {
            const double fx = (reference_basis(deg, {xi + e, eta}).values[j] - reference_basis(deg, {xi - e, eta}).values[j]) / (2 * e);
            const double fy = (reference_basis(deg, {xi, eta + e}).values[j] - reference_basis(deg, {xi, eta - e}).values[j]) / (2 * e);
            EXPECT_NEAR(fx, b.grads[j].x(), 1e-8);
            EXPECT_NEAR(fy, b.grads[j].y(), 1e-8);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, Basis, ::testing::Values(1, 2));

TEST(Interpolation, ReproducesPolynomialsOfTheSpace) {
    const Mesh m({0, 0, 1, 1}, 5, 4, DiagonalSplit::Alternating);
    const LevelSetBody far{Circle{0.01}, RigidPose{{9, 9}, 0}};
    const auto geo = build_cut_geometry(m, far, 1);
    const auto dofs = build_dof_map(m, geo, far, {2, 1});
    auto uq = [](const Vec2& x) { return Vec2(x.x() * x.x() - 2 * x.x() * x.y() + 0.3, 0.5 * x.y() * x.y() + x.x()); };
    auto gq = [](const Vec2& x) {
        Mat2 g;
        g << 2 * x.x() - 2 * x.y(), -2 * x.x(), 1.0, x.y();
        return g;
    };
    auto pl = [](const Vec2& x) { return 1.5 * x.x() - 0.7 * x.y() + 0.1; };
    const auto U = interpolate_velocity(uq, dofs);
    const auto P = interpolate_pressure(pl, dofs);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 100; ++k) {
        const Index t = static_cast<Index>(u(rng) * m.num_triangles()) % m.num_triangles();
        double a = u(rng), b = u(rng);
        if (a + b > 1) a = 1 - a, b = 1 - b;
        const auto v = m.vertices(t);
        const Vec2 x = v[0] + a * (v[1] - v[0]) + b * (v[2] - v[0]);
        const auto s = eval_velocity(m, dofs, U.values, t, x);
        EXPECT_LT((s.value - uq(x)).norm(), 1e-13);
        EXPECT_LT((s.grad - gq(x)).norm(), 1e-12);
        EXPECT_NEAR(eval_pressure(m, dofs, P.values, t, x), pl(x), 1e-13);
    }
}

// brute-force oracle: a node is kept iff it belongs to a non-solid element
TEST(DofMap, RetainedNodesMatchBruteForce) {
    const Mesh m({0, 0, 1, 1}, 16, 16);
    const LevelSetBody b{Ellipse{0.3, 0.12}, RigidPose{{0.52, 0.47}, 0.6}};
    const auto geo = build_cut_geometry(m, b, 2);
    for (int ku : {1, 2}) {
        const auto d = build_dof_map(m, geo, b, {ku, 1});
        const auto& sp = d.velocity;
        std::set<Index> keep;
        for (Index t = 0; t < m.num_triangles(); ++t) {
            if (geo.classes[t] == ElementClass::Solid) continue;
            for (int k = 0; k < sp.nodes_per_element(); ++k) keep.insert(sp.element_nodes[t][k]);
        }
        EXPECT_EQ(sp.num_retained(), static_cast<Index>(keep.size()));
        EXPECT_EQ(d.num_u(), 2 * static_cast<Index>(keep.size()));
        Index virt = 0;
        for (Index i : keep) virt += b.value(sp.coords[i]) < 0;
        EXPECT_EQ(sp.count(DofStatus::Virtual), virt);
        EXPECT_EQ(sp.count(DofStatus::Standard) + virt + sp.count(DofStatus::Eliminated), sp.num_nodes());
        EXPECT_EQ(d.num_lambda(), 2 * geo.num_cut());
        EXPECT_EQ(d.size(), d.num_u() + d.num_p() + d.num_lambda());
        // retained numbering is a bijection
        for (Index r = 0; r < sp.num_retained(); ++r) EXPECT_EQ(sp.index[sp.retained_nodes[r]], r);
    }
}

TEST(DofMap, NoBodyMeansAllStandard) {
    const Mesh m({0, 0, 1, 1}, 3, 3);
    const LevelSetBody far{Circle{0.01}, RigidPose{{9, 9}, 0}};
    const auto d = build_dof_map(m, build_cut_geometry(m, far, 1), far, {2, 1});
    EXPECT_EQ(d.velocity.num_retained(), m.num_nodes() + m.num_edges());
    EXPECT_EQ(d.pressure.num_retained(), m.num_nodes());
    EXPECT_EQ(d.num_lambda(), 0);
    EXPECT_THROW(build_dof_map(m, build_cut_geometry(m, far, 1), far, {3, 1}), InvalidArgument);
}

TEST(Interpolation, ConstantMultiplier) {
    const Mesh m({0, 0, 1, 1}, 10, 10);
    const LevelSetBody b{Circle{0.21}, RigidPose{{0.5, 0.5}, 0}};
    const auto geo = build_cut_geometry(m, b, 3);
    const auto d = build_dof_map(m, geo, b);
    const auto L = interpolate_multiplier([](const Vec2&) { return Vec2(0.25, -2.0); }, d, geo);
    for (Index k = 0; k < geo.num_cut(); ++k) {
        EXPECT_DOUBLE_EQ(L.values[2 * k], 0.25);
        EXPECT_DOUBLE_EQ(L.values[2 * k + 1], -2.0);
    }
}
