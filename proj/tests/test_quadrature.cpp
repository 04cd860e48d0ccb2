#include <gtest/gtest.h>

#include "xfd/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace xfd;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// ∫ over the reference triangle of xi^a eta^b
double ref_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

} // namespace

TEST(GaussLegendre, ExactOnMonomials) {
    for (int n = 1; n <= 8; ++n) {
        const auto r = gauss_legendre(n);
        ASSERT_EQ(r.points.size(), static_cast<std::size_t>(n));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], k);
            EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << n << " " << k;
        }
    }
    EXPECT_THROW(gauss_legendre(0), InvalidArgument);
}

class TriangleRuleOrder : public ::testing::TestWithParam<int> {};

TEST_P(TriangleRuleOrder, ExactUpToOrder) {
    const int order = GetParam();
    const auto r = triangle_rule(order);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        EXPECT_GE(r.points[i].x(), 0.0);
        EXPECT_GE(r.points[i].y(), 0.0);
        EXPECT_LE(r.points[i].x() + r.points[i].y(), 1.0 + 1e-15);
        EXPECT_GT(r.weights[i], 0.0);
    }
    for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < r.points.size(); ++i)
                s += r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
            EXPECT_NEAR(s, ref_monomial(a, b), 1e-15) << a << "," << b;
        }
}

INSTANTIATE_TEST_SUITE_P(Orders, TriangleRuleOrder, ::testing::Range(0, 11));

TEST(VolumeRule, FluidElementIntegratesPhysicalPolynomials) {
    const Mesh m({0, 0, 1, 1}, 3, 3, DiagonalSplit::Alternating);
    const LevelSetBody far{Circle{0.01}, RigidPose{{5, 5}, 0}};
    const auto geo = build_cut_geometry(m, far, 1);
    for (Index t = 0; t < m.num_triangles(); ++t) {
        const auto r = fluid_volume_rule(m, geo, t, 4);
        EXPECT_NEAR(r.total_weight(), m.signed_area(t), 1e-15);
        // ∫ x^2 y^2 over a triangle via the degree-4 reference moments of the affine map
        const auto v = m.vertices(t);
        double exact = 0;
        const Vec2 e1 = v[1] - v[0], e2 = v[2] - v[0];
        // expand (x0 + a xi + b eta)^2 (y0 + c xi + d eta)^2 term by term
        const double x0 = v[0].x(), y0 = v[0].y(), a = e1.x(), b = e2.x(), c = e1.y(), d = e2.y();
        const double X[3] = {x0, a, b}, Y[3] = {y0, c, d};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const int pxi = (i == 1) + (j == 1) + (k == 1) + (l == 1);
                        const int peta = (i == 2) + (j == 2) + (k == 2) + (l == 2);
                        exact += X[i] * X[j] * Y[k] * Y[l] * ref_monomial(pxi, peta);
                    }
        exact *= 2 * m.signed_area(t);
        double s = 0;
        for (std::size_t q = 0; q < r.points.size(); ++q)
            s += r.weights[q] * std::pow(r.points[q].x(), 2) * std::pow(r.points[q].y(), 2);
        EXPECT_NEAR(s, exact, 1e-15);
    }
}

TEST(QuadratureSet, CircleAreaLengthAndClosure) {
    const Mesh m({0, 0, 1, 1}, 20, 20);
    const double r = 0.21;
    const LevelSetBody b{Circle{r}, RigidPose{{0.5, 0.5}, 0}};
    const auto geo = build_cut_geometry(m, b, 4);
    const auto q = build_quadrature(m, geo, b, 4, 3);
    const double pi = std::numbers::pi;
    EXPECT_NEAR(fluid_area(q), 1 - pi * r * r, 1e-3 * (1 - pi * r * r));
    EXPECT_NEAR(interface_length(q), 2 * pi * r, 5e-3 * 2 * pi * r);
    Vec2 closure = Vec2::Zero();
    for (const auto& cell : q.surface)
        for (const auto& s : cell)
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                closure += s.weights[i] * s.normals[i];
                EXPECT_NEAR(b.value(s.points[i]), 0.0, 1e-3);   // chord sag
            }
    EXPECT_LT(closure.norm(), 1e-3 * 2 * pi * r);

    // cut cells: weights sum to the clipped fluid area
    for (const auto& c : geo.cells)
        EXPECT_NEAR(q.volume[c.element].total_weight(), c.fluid_area(), 1e-15);
}

// ∮ x·n ds over the chord polygon with n into the solid is -2|S_h| (divergence theorem)
TEST(QuadratureSet, ChordNormalsSatisfyDivergenceTheorem) {
    const Mesh m({0, 0, 1, 2.5}, 20, 50);
    const LevelSetBody b{Ellipse{0.24, 0.08}, RigidPose{{0.5, 2.0}, 1.4}};
    const auto geo = build_cut_geometry(m, b, 2);
    const auto q = build_quadrature(m, geo, b, 4, 3, NormalMode::Chord);
    double s = 0;
    for (const auto& cell : q.surface)
        for (const auto& r : cell)
            for (std::size_t i = 0; i < r.points.size(); ++i) {
                EXPECT_DOUBLE_EQ(r.normals[i].x(), r.chord_normal.x());
                s += r.weights[i] * r.points[i].dot(r.normals[i]);
            }
    const double solid = m.rect().area() - fluid_area(q);
    EXPECT_NEAR(s, -2 * solid, 1e-12);
}

TEST(SurfaceRule, ExactOnChordPolynomials) {
    const InterfaceSegment seg{0, {0.1, 0.2}, {0.4, 0.6}, Vec2(0.8, -0.6)};
    const LevelSetBody b{Circle{0.3}, RigidPose{{0, 0}, 0}};
    for (int order = 0; order <= 7; ++order) {
        const auto r = surface_rule(seg, b, order);
        EXPECT_NEAR(r.total_weight(), 0.5, 1e-15);
        // ∫ s^order along the chord, s in [0, L]
        double v = 0;
        for (std::size_t i = 0; i < r.points.size(); ++i)
            v += r.weights[i] * std::pow((r.points[i] - seg.p0).norm(), order);
        EXPECT_NEAR(v, std::pow(0.5, order + 1) / (order + 1), 1e-15);
    }
}
