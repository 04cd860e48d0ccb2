#include <gtest/gtest.h>

#include "xfd/mesh.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace xfd;

TEST(Mesh, SingleCell) {
    const Mesh m({0, 0, 1, 1}, 1, 1);
    EXPECT_EQ(m.num_nodes(), 4);
    EXPECT_EQ(m.num_triangles(), 2);
    double a = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) a += m.signed_area(t);
    EXPECT_NEAR(a, 1.0, 1e-15);
}

TEST(Mesh, FallBoxCount) {
    const Mesh m({0, 0, 1, 2.5}, 40, 100);
    EXPECT_EQ(m.num_triangles(), 8000);
    EXPECT_EQ(m.num_nodes(), 41 * 101);
}

TEST(Mesh, DiameterOfUniformSplit) {
    const Mesh m({0, 0, 1, 1}, 20, 20);
    EXPECT_NEAR(m.h(), std::sqrt(2.0) / 20.0, 1e-15);
}

TEST(Mesh, RejectsBadInput) {
    EXPECT_THROW(Mesh({0, 0, 1, 1}, 0, 3), InvalidArgument);
    EXPECT_THROW(Mesh({1, 0, 1, 1}, 2, 3), InvalidArgument);
}

class MeshShapes : public ::testing::TestWithParam<std::tuple<int, int, DiagonalSplit>> {};

TEST_P(MeshShapes, TilesTheRectangle) {
    const auto [nx, ny, split] = GetParam();
    const Rect r{-0.3, 0.2, 1.7, 0.9};
    const Mesh m(r, nx, ny, split);
    ASSERT_EQ(m.num_nodes(), (nx + 1) * (ny + 1));
    ASSERT_EQ(m.num_triangles(), 2 * nx * ny);

    double area = 0, hmax = 0;
    for (Index t = 0; t < m.num_triangles(); ++t) {
        EXPECT_GT(m.signed_area(t), 0.0);
        area += m.signed_area(t);
        hmax = std::max(hmax, m.diameter(t));
    }
    EXPECT_NEAR(area, r.area(), 1e-13 * r.area());
    EXPECT_DOUBLE_EQ(m.h(), hmax);

    // x-fast numbering
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const Vec2 p = m.node(j * (nx + 1) + i);
            EXPECT_NEAR(p.x(), r.x0 + i * r.width() / nx, 1e-14);
            EXPECT_NEAR(p.y(), r.y0 + j * r.height() / ny, 1e-14);
        }

    for (Index v = 0; v < m.num_nodes(); ++v) {
        const Vec2 p = m.node(v);
        const bool edge = std::abs(p.x() - r.x0) < 1e-12 || std::abs(p.x() - r.x1) < 1e-12 ||
                          std::abs(p.y() - r.y0) < 1e-12 || std::abs(p.y() - r.y1) < 1e-12;
        EXPECT_EQ(m.on_boundary(v), edge) << v;
    }

    // every interior edge is shared by exactly two triangles, boundary edges by one
    std::map<std::pair<Index, Index>, int> use;
    for (const auto& tri : m.triangles())
        for (int k = 0; k < 3; ++k) {
            Index a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++use[{a, b}];
        }
    EXPECT_EQ(static_cast<Index>(use.size()), m.num_edges());
    for (Index e = 0; e < m.num_edges(); ++e) {
        auto [a, b] = m.edge(e);
        if (a > b) std::swap(a, b);
        EXPECT_EQ(use[std::make_pair(a, b)], m.edge_on_boundary(e) ? 1 : 2);
    }
    // triangle_edges agrees with local vertex pairs
    for (Index t = 0; t < m.num_triangles(); ++t)
        for (int k = 0; k < 3; ++k) {
            const auto ed = m.edge(m.triangle_edges(t)[k]);
            const std::set<Index> s1{ed[0], ed[1]}, s2{m.triangle(t)[k], m.triangle(t)[(k + 1) % 3]};
            EXPECT_EQ(s1, s2);
        }
}

INSTANTIATE_TEST_SUITE_P(Grids, MeshShapes,
                         ::testing::Values(std::make_tuple(1, 1, DiagonalSplit::Uniform),
                                           std::make_tuple(3, 5, DiagonalSplit::Uniform),
                                           std::make_tuple(4, 4, DiagonalSplit::Alternating),
                                           std::make_tuple(7, 2, DiagonalSplit::Alternating)));
