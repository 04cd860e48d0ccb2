#include <gtest/gtest.h>

#include "xfd/discretization.hpp"

#include <random>

using namespace xfd;

namespace {

struct Fixture {
    Mesh mesh;
    LevelSetBody body;
    Discretization disc;

    Fixture(double gamma0, int n = 20, LevelSetBody b = {Circle{0.21}, RigidPose{{0.5, 0.5}, 0}},
          DiscretizationOptions opts = {})
        : mesh({0, 0, 1, 1}, n, n), body(b), disc(discretize(mesh, body, opts, {1.0, gamma0})) {}
};

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x[i] = u(rng);
    return x;
}

// Forms evaluated from finite element fields, without element matrices.
struct FieldForms {
    const Mesh& mesh;
    const Discretization& d;
    double nu = 1.0;

    Eigen::VectorXd u(const Eigen::VectorXd& x) const { return x.head(d.dofs.num_u()); }
    Eigen::VectorXd p(const Eigen::VectorXd& x) const { return x.segment(d.dofs.num_u(), d.dofs.num_p()); }
    Vec2 lam(const Eigen::VectorXd& x, std::size_t k) const {
        const Index o = d.dofs.num_u() + d.dofs.num_p() + 2 * static_cast<Index>(k);
        return {x[o], x[o + 1]};
    }

    // 2ν∫D(u):D(v) - ∫p div v - ∫q div u - ∫Γ λ·v - ∫Γ μ·u
    double galerkin(const Eigen::VectorXd& X, const Eigen::VectorXd& Y) const {
        double s = 0;
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const auto& vr = d.quad.volume[t];
            for (std::size_t q = 0; q < vr.points.size(); ++q) {
                const Vec2& x = vr.points[q];
                const auto a = eval_velocity(mesh, d.dofs, u(X), t, x);
                const auto b = eval_velocity(mesh, d.dofs, u(Y), t, x);
                const double pa = eval_pressure(mesh, d.dofs, p(X), t, x);
                const double pb = eval_pressure(mesh, d.dofs, p(Y), t, x);
                s += vr.weights[q] * (2 * nu * (sym_grad(a.grad).cwiseProduct(sym_grad(b.grad))).sum() -
                                      pa * b.grad.trace() - pb * a.grad.trace());
            }
        }
        for (std::size_t k = 0; k < d.quad.surface.size(); ++k) {
            const Index t = d.dofs.multiplier_elements[k];
            for (const auto& sr : d.quad.surface[k])
                for (std::size_t q = 0; q < sr.points.size(); ++q) {
                    const auto a = eval_velocity(mesh, d.dofs, u(X), t, sr.points[q]);
                    const auto b = eval_velocity(mesh, d.dofs, u(Y), t, sr.points[q]);
                    s -= sr.weights[q] * (lam(X, k).dot(b.value) + lam(Y, k).dot(a.value));
                }
        }
        return s;
    }

    // -γ ∫Γ (σ(u,p)n - λ)·(σ(v,q)n - μ)
    double stabilization(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, double gamma) const {
        double s = 0;
        for (std::size_t k = 0; k < d.quad.surface.size(); ++k) {
            const Index t = d.dofs.multiplier_elements[k];
            for (const auto& sr : d.quad.surface[k])
                for (std::size_t q = 0; q < sr.points.size(); ++q) {
                    const Vec2& x = sr.points[q];
                    const Vec2& n = sr.normals[q];
                    const auto a = eval_velocity(mesh, d.dofs, u(X), t, x);
                    const auto b = eval_velocity(mesh, d.dofs, u(Y), t, x);
                    const Vec2 ra = 2 * nu * sym_grad(a.grad) * n - eval_pressure(mesh, d.dofs, p(X), t, x) * n - lam(X, k);
                    const Vec2 rb = 2 * nu * sym_grad(b.grad) * n - eval_pressure(mesh, d.dofs, p(Y), t, x) * n - lam(Y, k);
                    s -= gamma * sr.weights[q] * ra.dot(rb);
                }
        }
        return s;
    }
};

} // namespace

TEST(Assembly, MatchesFormsEvaluatedFromFields) {
    const Fixture s(0.05, 10, {Ellipse{0.3, 0.12}, RigidPose{{0.48, 0.53}, 0.4}});
    const auto& sys = s.disc.system;
    const FieldForms f{s.mesh, s.disc};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Eigen::VectorXd X = random_vector(sys.layout.size(), seed);
        const Eigen::VectorXd Y = random_vector(sys.layout.size(), seed + 100);
        const double direct = X.dot(sys.matrix * Y);
        const double oracle = f.galerkin(X, Y) + f.stabilization(X, Y, sys.gamma);
        EXPECT_NEAR(direct, oracle, 1e-11 * (1 + std::abs(oracle)));
    }
}

// the pure stabilization term, re-assembled independently, is the difference of two assemblies
TEST(Assembly, GammaTermConsistency) {
    const Fixture a(0.05), z(0.0);
    const FieldForms f{a.mesh, a.disc};
    const SparseMatrix diff = a.disc.system.matrix - z.disc.system.matrix;
    for (std::uint64_t seed = 7; seed <= 9; ++seed) {
        const Eigen::VectorXd X = random_vector(diff.rows(), seed);
        const Eigen::VectorXd Y = random_vector(diff.rows(), seed * 31);
        EXPECT_NEAR(X.dot(diff * Y), f.stabilization(X, Y, a.disc.system.gamma), 1e-12 * diff.norm() * X.norm() * Y.norm());
    }
    EXPECT_DOUBLE_EQ(a.disc.system.gamma, 0.05 * a.mesh.h());
}

TEST(Assembly, Symmetry) {
    for (double g : {0.0, 0.05, 0.5}) {
        const Fixture s(g, 20, {Ellipse{0.24, 0.08}, RigidPose{{0.5, 0.51}, 1.4}});
        const SparseMatrix& A = s.disc.system.matrix;
        const SparseMatrix At = A.transpose();
        EXPECT_LE((A - At).norm(), 1e-13 * A.norm());
    }
}

TEST(Assembly, UnstabilizedBlocksVanish) {
    const Fixture s(0.0);
    const auto& sys = s.disc.system;
    EXPECT_EQ(sys.block(Block::PP).norm(), 0.0);
    EXPECT_EQ(sys.block(Block::PL).norm(), 0.0);
    EXPECT_EQ(sys.block(Block::LL).norm(), 0.0);
    EXPECT_GT(sys.block(Block::UL).norm(), 0.0);
    // A_ul alone is minus the velocity-multiplier mass on Γ: columns sum against u = e_c
    const FieldForms f{s.mesh, s.disc};
    const Eigen::VectorXd X = random_vector(sys.layout.size(), 4), Y = random_vector(sys.layout.size(), 5);
    EXPECT_NEAR(X.dot(sys.matrix * Y), f.galerkin(X, Y), 1e-11 * (1 + std::abs(f.galerkin(X, Y))));
}

TEST(Assembly, RigidMotionHasZeroEnergy) {
    for (double g : {0.0, 0.05}) {
        const Fixture s(g, 20, {Ellipse{0.24, 0.08}, RigidPose{{0.5, 0.51}, 1.4}});
        const auto& sys = s.disc.system;
        const auto U = interpolate_velocity([](const Vec2& x) -> Vec2 { return Vec2(0.3, -1.2) + 0.7 * perp(x - Vec2(0.5, 0.5)); },
                                            s.disc.dofs).values;
        const SparseMatrix Auu = sys.block(Block::UU);
        EXPECT_LE((Auu * U).norm(), 1e-10 * Auu.norm() * U.norm());
        EXPECT_LE(std::abs(U.dot(Auu * U)), 1e-10 * Auu.norm() * U.squaredNorm());
    }
}

TEST(Assembly, MassAndPressureWeightsIntegrateOne) {
    const Fixture s(0.05);
    const double area = fluid_area(s.disc.quad);
    const auto ones = interpolate_velocity([](const Vec2&) { return Vec2(1, 0); }, s.disc.dofs).values;
    EXPECT_NEAR(ones.dot(s.disc.system.mass * ones), area, 1e-12);
    EXPECT_NEAR(s.disc.system.pressure_weights.sum(), area, 1e-12);
    const SparseMatrix Mt = s.disc.system.mass.transpose();
    EXPECT_LE((s.disc.system.mass - Mt).norm(), 1e-15 * s.disc.system.mass.norm());
}

TEST(Assembly, ConvectionJacobianMatchesFiniteDifferences) {
    const Fixture s(0.05, 10);
    const auto& d = s.disc;
    const Eigen::VectorXd U = random_vector(d.dofs.num_u(), 21);
    const Eigen::VectorXd dU = random_vector(d.dofs.num_u(), 22);
    const auto c = assemble_convection(s.mesh, d.dofs, d.quad, U);
    const double e = 1e-4;
    const Eigen::VectorXd fd = (assemble_convection(s.mesh, d.dofs, d.quad, U + e * dU).vector -
                                assemble_convection(s.mesh, d.dofs, d.quad, U - e * dU).vector) / (2 * e);
    const Eigen::VectorXd jv = c.jacobian * dU;
    EXPECT_LE((fd - jv).norm(), 1e-5 * jv.norm());
    // N(U)U is quadratic: J(U) U = 2 N(U) U
    EXPECT_LE((c.jacobian * U - 2 * c.vector).norm(), 1e-12 * c.vector.norm());
    // a constant field is not convected
    const auto one = interpolate_velocity([](const Vec2&) { return Vec2(1, 2); }, d.dofs).values;
    EXPECT_LE(assemble_convection(s.mesh, d.dofs, d.quad, one).vector.norm(), 1e-13);
}

TEST(Assembly, RightHandSideMoments) {
    const Fixture s(0.05);
    const auto& d = s.disc;
    const auto rhs = assemble_rhs(s.mesh, d.dofs, d.quad,
                                  {[](const Vec2&) { return Vec2(2.0, -3.0); }, [](const Vec2& x) -> Vec2 { return Vec2(1.0, 0.5) + perp(x); }});
    double lx = 0, ly = 0;
    for (Index i = 0; i < d.dofs.num_u(); i += 2) lx += rhs.L[i], ly += rhs.L[i + 1];
    const double area = fluid_area(d.quad);
    EXPECT_NEAR(lx, 2.0 * area, 1e-12);
    EXPECT_NEAR(ly, -3.0 * area, 1e-12);
    EXPECT_TRUE(rhs.compatible);
    EXPECT_LE(std::abs(rhs.flux), 1e-14);
    // -∫ g over Γ: rigid part integrates from the chord midpoints
    Vec2 expect = Vec2::Zero();
    for (const auto& c : d.geo.cells)
        for (const auto& seg : c.segments) expect -= seg.length() * (Vec2(1.0, 0.5) + perp(seg.midpoint()));
    double gx = 0, gy = 0;
    for (Index k = 0; k < d.dofs.num_lambda(); k += 2) gx += rhs.G[k], gy += rhs.G[k + 1];
    EXPECT_NEAR(gx, expect.x(), 1e-13);
    EXPECT_NEAR(gy, expect.y(), 1e-13);

    // radial datum: flux is -2|S_h|, not compatible
    const auto bad = assemble_rhs(s.mesh, d.dofs, d.quad, {{}, [](const Vec2& x) { return Vec2(x - Vec2(0.5, 0.5)); }});
    EXPECT_FALSE(bad.compatible);
    EXPECT_NEAR(bad.flux, -2 * (1.0 - area), 1e-12);
}

TEST(Assembly, TractionOfConstantMultiplier) {
    const Fixture s(0.05, 20, {Ellipse{0.24, 0.08}, RigidPose{{0.5, 0.51}, 1.4}});
    const auto& d = s.disc;
    const Vec2 c(0.5, 0.51), lam(0.3, -1.1);
    Eigen::VectorXd L(d.dofs.num_lambda());
    for (Index k = 0; k < L.size(); k += 2) L[k] = lam.x(), L[k + 1] = lam.y();
    const auto tr = traction_functionals(d.quad, L, c);
    double len = 0;
    Vec2 moment = Vec2::Zero();
    for (const auto& cell : d.geo.cells)
        for (const auto& seg : cell.segments) len += seg.length(), moment += seg.length() * (seg.midpoint() - c);
    EXPECT_LT((tr.force + len * lam).norm(), 1e-13);
    EXPECT_NEAR(tr.torque, -perp(moment).dot(lam), 1e-13);
}

TEST(Assembly, RejectsBadParameters) {
    const Mesh m({0, 0, 1, 1}, 4, 4);
    const LevelSetBody b{Circle{0.2}, RigidPose{{0.5, 0.5}, 0}};
    EXPECT_THROW(discretize(m, b, {}, {1.0, -0.1}), InvalidArgument);
    EXPECT_THROW(discretize(m, b, {}, {0.0, 0.05}), InvalidArgument);
    const LevelSetBody huge{Circle{5.0}, RigidPose{{0.5, 0.5}, 0}};
    EXPECT_THROW(discretize(m, huge, {}, {1.0, 0.05}), EmptyFluid);
}

TEST(Assembly, RadialTractionHasNoMoment) {
    const Fixture s(0.05);
    const auto& d = s.disc;
    Eigen::VectorXd L(d.dofs.num_lambda());
    for (Index k = 0; k < L.size(); k += 2) L.segment<2>(k) = 1.7 * d.system.mean_normals.segment<2>(k);
    const auto tr = traction_functionals(d.quad, L, {0.5, 0.5});
    EXPECT_LT(std::abs(tr.torque), 1e-3);
}
