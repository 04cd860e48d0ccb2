#include "xfd/drivers.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <unordered_set>

namespace xfd {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec2 ManufacturedCase::u(const Vec2& x) const {
    const double cx = std::cos(kPi * x.x()), sx = std::sin(kPi * x.x());
    const double cy = std::cos(kPi * x.y()), sy = std::sin(kPi * x.y());
    return scale * Vec2(cx * sy, -sx * cy);
}

Mat2 ManufacturedCase::grad_u(const Vec2& x) const {
    const double cx = std::cos(kPi * x.x()), sx = std::sin(kPi * x.x());
    const double cy = std::cos(kPi * x.y()), sy = std::sin(kPi * x.y());
    Mat2 g;
    g << -sx * sy, cx * cy,
         -cx * cy, sx * sy;
    return scale * kPi * g;
}

double ManufacturedCase::p(const Vec2& x) const {
    return scale * std::sin(kPi * x.x()) * std::sin(kPi * x.y()) - p_shift;
}

Vec2 ManufacturedCase::f(const Vec2& x) const {
    const double cx = std::cos(kPi * x.x()), sx = std::sin(kPi * x.x());
    const double cy = std::cos(kPi * x.y()), sy = std::sin(kPi * x.y());
    // -Δu = 2π² u for this field
    const Vec2 grad_p = scale * kPi * Vec2(cx * sy, sx * cy);
    return 2.0 * nu * kPi * kPi * u(x) + grad_p;
}

Vec2 ManufacturedCase::traction(const Vec2& x, const Vec2& n) const {
    return 2.0 * nu * sym_grad(grad_u(x)) * n - p(x) * n;
}

ExactSolution ManufacturedCase::exact() const {
    const ManufacturedCase mc = *this;
    return {[mc](const Vec2& x) { return mc.u(x); }, [mc](const Vec2& x) { return mc.grad_u(x); },
            [mc](const Vec2& x) { return mc.p(x); }};
}

BoundaryData ManufacturedCase::data() const {
    const ManufacturedCase mc = *this;
    return {[mc](const Vec2& x) { return mc.f(x); }, [mc](const Vec2& x) { return mc.u(x); }};
}

double fluid_mean(const QuadratureSet& quad, const ScalarField& fn) {
    double sum = 0.0, area = 0.0;
    for (const VolumeRule& vr : quad.volume)
        for (std::size_t q = 0; q < vr.points.size(); ++q) {
            sum += vr.weights[q] * fn(vr.points[q]);
            area += vr.weights[q];
        }
    XFD_REQUIRE(area > 0.0, EmptyFluid, "fluid mean over an empty fluid domain");
    return sum / area;
}

ManufacturedRun solve_manufactured(const Mesh& mesh, const LevelSetBody& body, const Config& cfg, double gamma0,
                                   double scale) {
    const DiscretizationOptions opts = cfg.discretization();
    ManufacturedRun run{discretize(mesh, body, opts, cfg.fluid(gamma0)), {}, {}};
    const Discretization& d = run.disc;

    ManufacturedCase mc{cfg.physics.nu, scale, 0.0};
    mc.p_shift = fluid_mean(d.quad, [&mc](const Vec2& x) { return mc.p(x); });

    const RightHandSide rhs = assemble_rhs(mesh, d.dofs, d.quad, mc.data());
    const DirichletData bc = outer_dirichlet(d.dofs, [&mc](const Vec2& x) { return mc.u(x); });
    run.solution = solve_stokes(d.system, rhs.full(d.system.layout), bc, cfg.solve_options());

    const QuadratureSet fine =
        build_quadrature(mesh, d.geo, body, opts.volume_order + 2, opts.surface_order + 2, opts.normals);
    run.errors = compute_errors(mesh, d.dofs, fine, run.solution, mc.exact(), cfg.physics.nu);
    return run;
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& err) {
    XFD_REQUIRE(h.size() == err.size() && h.size() >= 2, InvalidArgument, "rate fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double lx = std::log(h[i]);
        const double ly = std::log(std::max(err[i], std::numeric_limits<double>::min()));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

Mesh mesh_with_subdivisions(const MeshConfig& m, int n) {
    const int ny = std::max(1, static_cast<int>(std::lround(n * m.rect.height() / m.rect.width())));
    return build_structured_mesh(m.rect, n, ny, m.split);
}

LevelSetBody body_at(const Config& cfg, const Vec2& center) {
    return {cfg.shape.shape(), RigidPose{center, cfg.shape.theta0}};
}

} // namespace

ConvergenceResult run_convergence(const Config& cfg, double scale) {
    ConvergenceResult res;
    std::vector<double> hs, eu1, eu0, ep, el;
    for (int n : cfg.convergence.subdivisions) {
        const Mesh mesh = mesh_with_subdivisions(cfg.mesh, n);
        const ManufacturedRun run =
            solve_manufactured(mesh, body_at(cfg, cfg.shape.center), cfg, cfg.physics.gamma0, scale);
        spdlog::info("convergence n={} h={:.4f} eu_H1={:.3e} ep={:.3e} el={:.3e}", n, run.errors.h,
                     run.errors.err_u_H1, run.errors.err_p_L2, run.errors.err_lambda_L2);
        res.rows.push_back(run.errors);
        hs.push_back(run.errors.h);
        eu1.push_back(run.errors.err_u_H1);
        eu0.push_back(run.errors.err_u_L2);
        ep.push_back(run.errors.err_p_L2);
        el.push_back(run.errors.err_lambda_L2);
    }
    if (hs.size() >= 2) {
        res.rate_u_H1 = fitted_rate(hs, eu1);
        res.rate_u_L2 = fitted_rate(hs, eu0);
        res.rate_p_L2 = fitted_rate(hs, ep);
        res.rate_lambda = fitted_rate(hs, el);
    }
    return res;
}

int SweepResult::failures_unstab() const {
    int n = 0;
    for (const auto& r : rows) n += std::isinf(r.rel_err_unstab_pct) ? 1 : 0;
    return n;
}

int SweepResult::failures_stab() const {
    int n = 0;
    for (const auto& r : rows) n += std::isinf(r.rel_err_stab_pct) ? 1 : 0;
    return n;
}

SweepResult run_sweep(const Config& cfg) {
    const Mesh mesh = build_structured_mesh(cfg.mesh.rect, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.split);
    SweepResult res;
    const int count = cfg.sweep.num_positions();
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
        SweepRow row;
        row.x_c = cfg.sweep.x_min + i * cfg.sweep.step;
        const LevelSetBody body = body_at(cfg, {row.x_c, cfg.shape.center.y()});
        bool stab_ok = true, unstab_ok = true;
        try {
            row.rel_err_stab_pct = 100.0 * solve_manufactured(mesh, body, cfg, cfg.physics.gamma0).errors.rel_lambda();
        } catch (const SingularSystem& e) {
            spdlog::warn("sweep x_c={:.4f} stabilized: {}", row.x_c, e.what());
            row.rel_err_stab_pct = inf;
            stab_ok = false;
        }
        try {
            row.rel_err_unstab_pct =
                100.0 * solve_manufactured(mesh, body, cfg, cfg.sweep.gamma0_unstab).errors.rel_lambda();
        } catch (const SingularSystem& e) {
            spdlog::warn("sweep x_c={:.4f} unstabilized: {}", row.x_c, e.what());
            row.rel_err_unstab_pct = inf;
            unstab_ok = false;
        }
        row.status = stab_ok && unstab_ok ? "ok" : !stab_ok && !unstab_ok ? "both_singular"
                                                 : !stab_ok               ? "stab_singular"
                                                                          : "unstab_singular";
        spdlog::info("sweep x_c={:.4f} stab={:.4g}% unstab={:.4g}% {}", row.x_c, row.rel_err_stab_pct,
                     row.rel_err_unstab_pct, row.status);
        res.rows.push_back(row);
    }
    return res;
}

SteadyResult run_steady(const Config& cfg) {
    SteadyResult res;
    res.mesh = std::make_unique<Mesh>(build_structured_mesh(cfg.mesh.rect, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.split));
    res.run = solve_manufactured(*res.mesh, body_at(cfg, cfg.shape.center), cfg, cfg.physics.gamma0);
    return res;
}

RigidBodyState initial_body_state(const Config& cfg) {
    RigidBodyState s;
    s.center = cfg.shape.center;
    s.angle = cfg.shape.theta0;
    return s;
}

FallResult run_fall(const Config& cfg, const FallObserver& observer) {
    const Mesh mesh = build_structured_mesh(cfg.mesh.rect, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.split);
    const RigidBodyParams params =
        derive_body_params(cfg.shape.shape(), cfg.shape.mass, cfg.physics.rho_f, cfg.physics.g_mag);
    TimeLoopConfig loop;
    loop.dt = cfg.time.dt;
    loop.t_end = cfg.time.t_end;
    loop.couple_fluid = cfg.time.couple_fluid;

    FallResult res;
    try {
        FallSimulation sim(mesh, cfg.shape.shape(), initial_body_state(cfg), params, cfg.fluid(),
                           cfg.discretization(), cfg.solve_options(), loop);
        const int steps = cfg.time.num_steps();
        for (int n = 0; n < steps; ++n) {
            const StepRecord rec = sim.advance();
            res.records.push_back(rec);
            if (observer) observer(sim, rec);
            if (rec.step % 25 == 0)
                spdlog::info("fall step {}/{} t={:.4f} h=({:.5f}, {:.5f}) theta={:.5f}", rec.step, steps, rec.t,
                             rec.state.center.x(), rec.state.center.y(), rec.state.angle);
        }
        res.completed = true;
    } catch (const NewtonDiverged& e) {
        res.failure_kind = "NewtonDiverged";
        res.failure = e.what();
    } catch (const SolidLeftDomain& e) {
        res.failure_kind = "SolidLeftDomain";
        res.failure = e.what();
    } catch (const SingularSystem& e) {
        res.failure_kind = "SingularSystem";
        res.failure = e.what();
    }
    if (!res.completed) spdlog::error("fall stopped after {} steps: {}", res.records.size(), res.failure);
    return res;
}

InverseConstants sample_inverse_constants(const Mesh& mesh, const LevelSetBody& body, const DiscretizationOptions& opts,
                                          int samples, std::uint64_t seed) {
    XFD_REQUIRE(samples >= 1, InvalidArgument, "need at least one sample");
    const CutGeometry geo = build_cut_geometry(mesh, body, opts.nseg_per_cut, opts.tol);
    const DofMap dofs = build_dof_map(mesh, geo, body, opts.space);
    const QuadratureSet quad = build_quadrature(mesh, geo, body, opts.volume_order, opts.surface_order, opts.normals);

    // nodes of the cut elements
    std::unordered_set<Index> vnodes, pnodes;
    for (Index t : dofs.multiplier_elements) {
        const auto& vn = dofs.velocity.element_nodes[static_cast<std::size_t>(t)];
        const auto& pn = dofs.pressure.element_nodes[static_cast<std::size_t>(t)];
        for (int a = 0; a < dofs.velocity.nodes_per_element(); ++a) vnodes.insert(vn[static_cast<std::size_t>(a)]);
        for (int a = 0; a < dofs.pressure.nodes_per_element(); ++a) pnodes.insert(pn[static_cast<std::size_t>(a)]);
    }
    std::vector<Index> vlist(vnodes.begin(), vnodes.end()), plist(pnodes.begin(), pnodes.end());
    std::sort(vlist.begin(), vlist.end());
    std::sort(plist.begin(), plist.end());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    InverseConstants out;
    out.h = mesh.h();
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(dofs.num_u());
        Eigen::VectorXd p = Eigen::VectorXd::Zero(dofs.num_p());
        for (Index node : vlist)
            for (int c = 0; c < 2; ++c) u[dofs.u_dof(node, c)] = uni(rng);
        for (Index node : plist) p[dofs.p_dof(node) - dofs.num_u()] = uni(rng);

        double v_vol = 0.0, q_vol = 0.0, v_surf = 0.0, q_surf = 0.0;
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const VolumeRule& vr = quad.volume[static_cast<std::size_t>(t)];
            for (std::size_t q = 0; q < vr.points.size(); ++q) {
                const VelocitySample vs = eval_velocity(mesh, dofs, u, t, vr.points[q]);
                const double ph = eval_pressure(mesh, dofs, p, t, vr.points[q]);
                v_vol += vr.weights[q] * (vs.value.squaredNorm() + vs.grad.squaredNorm());
                q_vol += vr.weights[q] * ph * ph;
            }
        }
        for (std::size_t k = 0; k < quad.surface.size(); ++k) {
            const Index t = dofs.multiplier_elements[k];
            for (const SurfaceRule& sr : quad.surface[k])
                for (std::size_t q = 0; q < sr.points.size(); ++q) {
                    const VelocitySample vs = eval_velocity(mesh, dofs, u, t, sr.points[q]);
                    const double ph = eval_pressure(mesh, dofs, p, t, sr.points[q]);
                    v_surf += sr.weights[q] * (sym_grad(vs.grad) * sr.normals[q]).squaredNorm();
                    q_surf += sr.weights[q] * ph * ph;
                }
        }
        if (v_vol > 0.0) out.velocity = std::max(out.velocity, out.h * v_surf / v_vol);
        if (q_vol > 0.0) out.pressure = std::max(out.pressure, out.h * q_surf / q_vol);
    }
    return out;
}

} // namespace xfd
