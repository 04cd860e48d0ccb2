#include "xfd/fsi.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

namespace xfd {

RigidBodyParams derive_body_params(const Shape& shape, double mass, double rho_f, double g_mag) {
    XFD_REQUIRE(mass > 0.0, InvalidArgument, "body mass must be positive");
    XFD_REQUIRE(rho_f >= 0.0, InvalidArgument, "fluid density must be non-negative");
    const LevelSetBody probe(shape, {});
    const auto ab = probe.semi_axes();
    RigidBodyParams p;
    p.mass = mass;
    p.added_mass = rho_f * std::numbers::pi * ab[0] * ab[1];
    p.inertia = mass * (ab[0] * ab[0] + ab[1] * ab[1]) / 4.0;
    p.g_mag = g_mag;
    return p;
}

Vec2 rigid_velocity(const RigidBodyState& s, const Vec2& x) { return s.velocity + s.omega * perp(x - s.center); }

namespace {

bool strictly_inside(const Rect& outer, const Rect& inner) {
    return inner.x0 > outer.x0 && inner.y0 > outer.y0 && inner.x1 < outer.x1 && inner.y1 < outer.y1;
}

} // namespace

FallSimulation::FallSimulation(const Mesh& mesh, Shape shape, const RigidBodyState& initial,
                               const RigidBodyParams& body, const FluidParams& fluid,
                               const DiscretizationOptions& disc, const SolveOptions& solve,
                               const TimeLoopConfig& loop)
    : mesh_(mesh), shape_(std::move(shape)), params_(body), fluid_(fluid), disc_opts_(disc), solve_opts_(solve),
      loop_(loop), state_(initial) {
    XFD_REQUIRE(loop_.dt > 0.0, InvalidArgument, "dt must be positive");
    XFD_REQUIRE(params_.mass > 0.0 && params_.inertia > 0.0, InvalidArgument, "body mass and inertia must be positive");
    const LevelSetBody b = this->body();
    if (!strictly_inside(mesh_.rect(), b.bounding_box())) throw SolidLeftDomain("initial body is not inside the box");

    // startup: h^{-1} = h^0 - dt hdot^0
    prev_center_ = state_.center - loop_.dt * state_.velocity;
    prev_angle_ = state_.angle - loop_.dt * state_.omega;

    const CutGeometry geo = build_cut_geometry(mesh_, b, disc_opts_.nseg_per_cut, disc_opts_.tol);
    const DofMap dofs = build_dof_map(mesh_, geo, b, disc_opts_.space);
    velocity_coords_ = dofs.velocity.coords;
    nodal_u_.assign(static_cast<std::size_t>(dofs.velocity.num_nodes()), Vec2::Zero());
    nodal_p_ = Eigen::VectorXd::Zero(dofs.pressure.num_nodes());
    lambda_by_element_.assign(static_cast<std::size_t>(mesh_.num_triangles()), Vec2::Zero());
    if (loop_.couple_fluid) {
        disc_ = discretize(mesh_, b, disc_opts_, fluid_);
        lambda_ = Eigen::VectorXd::Zero(disc_->dofs.num_lambda());
    }
}

StepRecord FallSimulation::advance() {
    const double dt = loop_.dt;
    const double m = params_.mass;

    // 1. body velocities from the traction of the current level
    Traction tr;
    if (disc_) tr = traction_functionals(disc_->quad, lambda_, state_.center);
    const Vec2 force = tr.force + (m - params_.added_mass) * params_.gravity();
    RigidBodyState next = state_;
    next.velocity = state_.velocity + dt * force / m;
    next.omega = state_.omega + dt * tr.torque / params_.inertia;

    // 2. rigid extension into the old solid
    {
        const LevelSetBody old_body = body();
        RigidBodyState ext = next;
        ext.center = state_.center;
        const std::vector<Vec2>& coords = velocity_coords_;
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (old_body.value(coords[i]) < 0.0) nodal_u_[i] = rigid_velocity(ext, coords[i]);
    }

    // 3. poses
    next.center = 2.0 * state_.center - prev_center_ + dt * dt * force / m;
    next.angle = 2.0 * state_.angle - prev_angle_ + dt * dt * tr.torque / params_.inertia;

    StepRecord rec;
    rec.step = step_ + 1;
    rec.t = (step_ + 1) * dt;
    rec.recurrence_defect = std::max(((next.center - state_.center) / dt - next.velocity).norm(),
                                     std::abs((next.angle - state_.angle) / dt - next.omega));

    const LevelSetBody new_body(shape_, next.pose());
    if (!strictly_inside(mesh_.rect(), new_body.bounding_box()))
        throw SolidLeftDomain("body left the box at t = " + std::to_string(rec.t));

    prev_center_ = state_.center;
    prev_angle_ = state_.angle;
    state_ = next;
    ++step_;

    // 4-5. rigid datum and fluid solve on the new geometry
    if (loop_.couple_fluid) solve_fluid(rec);
    rec.state = state_;
    return rec;
}

void FallSimulation::solve_fluid(StepRecord& rec) {
    const LevelSetBody b = body();
    Discretization d = discretize(mesh_, b, disc_opts_, fluid_);
    const DofMap& dofs = d.dofs;
    const BlockLayout& lay = d.system.layout;

    BoundaryData data;
    const RigidBodyState s = state_;
    data.g = [s](const Vec2& x) { return rigid_velocity(s, x); };
    const RightHandSide rhs = assemble_rhs(mesh_, dofs, d.quad, data);
    rec.flux = rhs.flux;

    TransientProblem prob;
    prob.system = &d.system;
    prob.rhs = rhs.full(lay);
    prob.bc = outer_dirichlet(dofs);
    prob.dt = loop_.dt;
    prob.u_prev = Eigen::VectorXd::Zero(lay.nu);
    Eigen::VectorXd guess = Eigen::VectorXd::Zero(lay.size());
    for (Index r = 0; r < dofs.velocity.num_retained(); ++r) {
        const Vec2& v = nodal_u_[static_cast<std::size_t>(dofs.velocity.retained_nodes[static_cast<std::size_t>(r)])];
        prob.u_prev[2 * r] = v.x();
        prob.u_prev[2 * r + 1] = v.y();
    }
    guess.head(lay.nu) = prob.u_prev;
    for (Index r = 0; r < dofs.pressure.num_retained(); ++r)
        guess[lay.p_offset() + r] = nodal_p_[dofs.pressure.retained_nodes[static_cast<std::size_t>(r)]];
    for (std::size_t k = 0; k < dofs.multiplier_elements.size(); ++k) {
        const Vec2& l = lambda_by_element_[static_cast<std::size_t>(dofs.multiplier_elements[k])];
        guess[lay.l_offset() + static_cast<Index>(2 * k)] = l.x();
        guess[lay.l_offset() + static_cast<Index>(2 * k + 1)] = l.y();
    }
    const Mesh& mesh = mesh_;
    prob.convection = [&mesh, &d](const Eigen::VectorXd& u) { return assemble_convection(mesh, d.dofs, d.quad, u); };

    const Solution sol = solve_navier_stokes_step(prob, guess, solve_opts_);
    rec.newton_iterations = sol.iterations;

    for (Index r = 0; r < dofs.velocity.num_retained(); ++r)
        nodal_u_[static_cast<std::size_t>(dofs.velocity.retained_nodes[static_cast<std::size_t>(r)])] =
            Vec2(sol.x[2 * r], sol.x[2 * r + 1]);
    nodal_p_.setZero();
    for (Index r = 0; r < dofs.pressure.num_retained(); ++r)
        nodal_p_[dofs.pressure.retained_nodes[static_cast<std::size_t>(r)]] = sol.x[lay.p_offset() + r];
    lambda_ = sol.x.tail(lay.nl);
    std::fill(lambda_by_element_.begin(), lambda_by_element_.end(), Vec2::Zero());
    for (std::size_t k = 0; k < dofs.multiplier_elements.size(); ++k)
        lambda_by_element_[static_cast<std::size_t>(dofs.multiplier_elements[k])] =
            Vec2(lambda_[static_cast<Index>(2 * k)], lambda_[static_cast<Index>(2 * k + 1)]);

    rec.traction = traction_functionals(d.quad, lambda_, state_.center);
    rec.num_cut = d.geo.num_cut();
    rec.num_u = lay.nu;
    rec.num_p = lay.np;
    rec.num_lambda = lay.nl;
    spdlog::debug("step {}: t={:.4f} h=({:.5f},{:.5f}) theta={:.5f} newton={}", rec.step, rec.t, state_.center.x(),
                  state_.center.y(), state_.angle, rec.newton_iterations);
    disc_ = std::move(d);
}

} // namespace xfd
