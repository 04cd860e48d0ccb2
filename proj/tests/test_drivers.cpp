#include <gtest/gtest.h>

#include "xfd/drivers.hpp"

#include <cmath>
#include <numbers>

using namespace xfd;

namespace {

Config small(Experiment e) {
    Config c = default_config(e);
    c.mesh.nx = c.mesh.ny = 10;
    return c;
}

} // namespace

TEST(Manufactured, FieldsAreConsistent) {
    const ManufacturedCase mc{1.3, 0.7, 0.25};
    const double e = 1e-5;
    for (const Vec2 x : {Vec2(0.1, 0.2), Vec2(0.73, 0.41), Vec2(0.5, 0.95)}) {
        Mat2 g;
        for (int j = 0; j < 2; ++j) {
            Vec2 d = Vec2::Zero();
            d[j] = e;
            g.col(j) = (mc.u(x + d) - mc.u(x - d)) / (2 * e);
        }
        EXPECT_LT((g - mc.grad_u(x)).norm(), 1e-9);
        EXPECT_NEAR(mc.grad_u(x).trace(), 0.0, 1e-14);
        // -ν Δu + ∇p by second differences
        Vec2 lap = Vec2::Zero(), gp;
        for (int j = 0; j < 2; ++j) {
            Vec2 d = Vec2::Zero();
            d[j] = 1e-4;
            lap += (mc.u(x + d) - 2 * mc.u(x) + mc.u(x - d)) / 1e-8;
            gp[j] = (mc.p(x + d) - mc.p(x - d)) / 2e-4;
        }
        EXPECT_LT((mc.f(x) - (-mc.nu * lap + gp)).norm(), 1e-5 * (1 + mc.f(x).norm()));
        const Vec2 n = Vec2(0.6, -0.8);
        EXPECT_LT((mc.traction(x, n) - (mc.nu * (g + g.transpose()) * n - mc.p(x) * n)).norm(), 1e-8);
    }
    const ManufacturedCase zero{1.0, 0.0, 0.0};
    EXPECT_EQ(zero.u({0.3, 0.3}), Vec2::Zero());
    EXPECT_EQ(zero.p({0.3, 0.3}), 0.0);
}

TEST(FittedRate, ExactPowerLaw) {
    EXPECT_NEAR(fitted_rate({0.1, 0.05, 0.025}, {3e-2, 7.5e-3, 1.875e-3}), 2.0, 1e-12);
    EXPECT_NEAR(fitted_rate({1.0, 0.5}, {1.0, 0.5}), 1.0, 1e-12);
    EXPECT_THROW(fitted_rate({0.1}, {0.2}), InvalidArgument);
}

TEST(Manufactured, ZeroCaseHasZeroError) {
    const Config cfg = small(Experiment::Steady);
    const Mesh mesh({0, 0, 1, 1}, 10, 10);
    const LevelSetBody b{Circle{0.21}, RigidPose{{0.5, 0.5}, 0}};
    const auto run = solve_manufactured(mesh, b, cfg, 0.05, 0.0);
    EXPECT_EQ(run.errors.err_u_H1, 0.0);
    EXPECT_EQ(run.errors.err_p_L2, 0.0);
    EXPECT_EQ(run.errors.err_lambda_L2, 0.0);
}

// weak incompressibility through the interface
TEST(Manufactured, InterfaceFluxIsSmall) {
    const Config cfg = default_config(Experiment::Steady);
    const Mesh mesh({0, 0, 1, 1}, 20, 20);
    const LevelSetBody b{Circle{0.21}, RigidPose{{0.5, 0.5}, 0}};
    const auto run = solve_manufactured(mesh, b, cfg, 0.05);
    const auto& d = run.disc;
    double flux = 0, umax = 0;
    const Eigen::VectorXd u = run.solution.U().values;
    for (std::size_t k = 0; k < d.quad.surface.size(); ++k)
        for (const auto& sr : d.quad.surface[k])
            for (std::size_t q = 0; q < sr.points.size(); ++q) {
                const auto s = eval_velocity(mesh, d.dofs, u, d.dofs.multiplier_elements[k], sr.points[q]);
                flux += sr.weights[q] * s.value.dot(sr.chord_normal);
                umax = std::max(umax, s.value.norm());
            }
    EXPECT_LE(std::abs(flux), 1e-6 * interface_length(d.quad) * umax);
    EXPECT_LT(run.errors.rel_lambda(), 0.2);
    EXPECT_LT(run.errors.err_u_H1, 0.05);
}

TEST(Convergence, ShortSequence) {
    Config cfg = small(Experiment::Convergence);
    cfg.convergence.subdivisions = {8, 16};
    cfg.physics.gamma0 = 0.01;
    const auto r = run_convergence(cfg);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_NEAR(r.rows[0].h, std::sqrt(2.0) / 8, 1e-15);
    EXPECT_LT(r.rows[1].err_u_H1, r.rows[0].err_u_H1);
    EXPECT_GT(r.rate_u_H1, 1.0);
    EXPECT_NEAR(r.rate_u_H1, std::log(r.rows[1].err_u_H1 / r.rows[0].err_u_H1) / std::log(r.rows[1].h / r.rows[0].h), 1e-12);
}

TEST(Sweep, RowsAndStatus) {
    Config cfg = default_config(Experiment::Sweep);
    cfg.sweep.x_min = 0.5;
    cfg.sweep.x_max = 0.51;
    cfg.sweep.step = 0.005;
    const auto r = run_sweep(cfg);
    ASSERT_EQ(r.rows.size(), 3u);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        EXPECT_NEAR(r.rows[i].x_c, 0.5 + 0.005 * i, 1e-15);
        if (r.rows[i].status == "ok") {
            EXPECT_TRUE(std::isfinite(r.rows[i].rel_err_stab_pct));
            EXPECT_GT(r.rows[i].rel_err_stab_pct, 0.0);
        }
    }
    EXPECT_EQ(r.failures_stab(), 0);
}

TEST(Fall, UncoupledRunAndObserver) {
    Config cfg = default_config(Experiment::Fall);
    cfg.mesh.nx = 10;
    cfg.mesh.ny = 25;
    cfg.time.couple_fluid = false;
    cfg.time.dt = 1e-2;
    cfg.time.t_end = 0.1;
    int calls = 0;
    const auto r = run_fall(cfg, [&](const FallSimulation& sim, const StepRecord& rec) {
        ++calls;
        EXPECT_EQ(sim.step(), rec.step);
    });
    EXPECT_TRUE(r.completed);
    EXPECT_EQ(static_cast<int>(r.records.size()), cfg.time.num_steps());
    EXPECT_EQ(calls, cfg.time.num_steps());

    cfg.time.t_end = 5.0;
    const auto out = run_fall(cfg);
    EXPECT_FALSE(out.completed);
    EXPECT_EQ(out.failure_kind, "SolidLeftDomain");
    EXPECT_FALSE(out.records.empty());
}

TEST(InverseConstants, SeededAndBounded) {
    const Mesh mesh({0, 0, 1, 1}, 10, 10);
    const LevelSetBody b{Circle{0.21}, RigidPose{{0.5, 0.5}, 0}};
    const DiscretizationOptions o;
    const auto a = sample_inverse_constants(mesh, b, o, 20, 9);
    const auto c = sample_inverse_constants(mesh, b, o, 20, 9);
    EXPECT_EQ(a.velocity, c.velocity);
    EXPECT_EQ(a.pressure, c.pressure);
    EXPECT_GT(a.velocity, 0.0);
    EXPECT_GT(a.pressure, 0.0);
    EXPECT_LT(a.velocity, 100.0);
    // more samples can only raise a sampled supremum
    EXPECT_GE(sample_inverse_constants(mesh, b, o, 40, 9).velocity, a.velocity);
    EXPECT_THROW(sample_inverse_constants(mesh, b, o, 0, 1), InvalidArgument);
}
