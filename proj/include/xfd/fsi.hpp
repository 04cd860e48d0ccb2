#pragma once

#include "xfd/discretization.hpp"
#include "xfd/solve.hpp"

#include <optional>
#include <vector>

namespace xfd {

struct RigidBodyParams {
    double mass = 20.0;
    double added_mass = 0.0;   // displaced fluid mass rho_f |S|
    double inertia = 0.0;
    double g_mag = 9.81;

    Vec2 gravity() const { return {0.0, -g_mag}; }
};

/// Displaced mass rho_f*pi*a*b and moment of inertia m(a^2 + b^2)/4 of a
/// uniform ellipse (circle: a == b).
RigidBodyParams derive_body_params(const Shape& shape, double mass, double rho_f, double g_mag = 9.81);

struct RigidBodyState {
    Vec2 center = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();
    double angle = 0.0;
    double omega = 0.0;

    RigidPose pose() const { return {center, angle}; }
};

/// hdot + omega (x - h)^⊥.
Vec2 rigid_velocity(const RigidBodyState& s, const Vec2& x);

struct TimeLoopConfig {
    double dt = 1e-3;
    double t_end = 0.551;
    /// When false the fluid is never solved and Λ stays zero: the body falls
    /// under gravity and buoyancy only.
    bool couple_fluid = true;
};

struct StepRecord {
    int step = 0;
    double t = 0.0;
    RigidBodyState state;
    Traction traction;              // from Λ at the new time level
    int newton_iterations = 0;
    double flux = 0.0;              // ∮ G·n of the rigid datum
    double recurrence_defect = 0.0; // |(h^{n+1} - h^n)/dt - hdot^{n+1}|, same for the angle
    Index num_cut = 0;
    Index num_u = 0, num_p = 0, num_lambda = 0;
};

/// Partitioned rigid body / fluid time stepping on a fixed background mesh.
///
/// Per step: explicit body velocity update from the fluid traction of the
/// previous level, rigid extension of the velocity into the old solid,
/// second-difference pose update, new rigid interface datum, and one
/// backward-Euler Navier-Stokes solve on the new cut geometry.
class FallSimulation {
public:
    FallSimulation(const Mesh& mesh, Shape shape, const RigidBodyState& initial, const RigidBodyParams& body,
                   const FluidParams& fluid, const DiscretizationOptions& disc, const SolveOptions& solve,
                   const TimeLoopConfig& loop);

    StepRecord advance();

    int step() const { return step_; }
    double time() const { return step_ * loop_.dt; }
    const RigidBodyState& state() const { return state_; }
    LevelSetBody body() const { return {shape_, state_.pose()}; }
    const RigidBodyParams& body_params() const { return params_; }
    /// Only present when the fluid is coupled.
    const std::optional<Discretization>& discretization() const { return disc_; }

    /// Velocity at every velocity node of the background mesh; nodes outside
    /// the fluid carry the rigid extension.
    const std::vector<Vec2>& nodal_velocity() const { return nodal_u_; }
    const Eigen::VectorXd& nodal_pressure() const { return nodal_p_; }
    /// Current multiplier vector (ordering of the current dof map).
    const Eigen::VectorXd& multiplier() const { return lambda_; }

private:
    void solve_fluid(StepRecord& rec);

    const Mesh& mesh_;
    Shape shape_;
    RigidBodyParams params_;
    FluidParams fluid_;
    DiscretizationOptions disc_opts_;
    SolveOptions solve_opts_;
    TimeLoopConfig loop_;

    int step_ = 0;
    RigidBodyState state_;
    Vec2 prev_center_;
    double prev_angle_ = 0.0;

    std::optional<Discretization> disc_;
    std::vector<Vec2> velocity_coords_;
    std::vector<Vec2> nodal_u_;
    Eigen::VectorXd nodal_p_;
    Eigen::VectorXd lambda_;
    std::vector<Vec2> lambda_by_element_;
};

} // namespace xfd
