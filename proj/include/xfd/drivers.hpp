#pragma once

#include "xfd/config.hpp"
#include "xfd/fsi.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace xfd {

/// u = s (cos πx sin πy, -sin πx cos πy), p = s sin πx sin πy - shift.
/// Divergence-free on the whole plane; s = 0 gives the zero solution.
struct ManufacturedCase {
    double nu = 1.0;
    double scale = 1.0;
    double p_shift = 0.0;   // fluid mean of the unshifted pressure

    Vec2 u(const Vec2& x) const;
    Mat2 grad_u(const Vec2& x) const;
    double p(const Vec2& x) const;
    /// -ν Δu + ∇p.
    Vec2 f(const Vec2& x) const;
    /// 2ν D(u) n - p n.
    Vec2 traction(const Vec2& x, const Vec2& n) const;

    ExactSolution exact() const;
    BoundaryData data() const;
};

/// Fluid mean of `fn` under the given quadrature.
double fluid_mean(const QuadratureSet& quad, const ScalarField& fn);

struct ManufacturedRun {
    Discretization disc;
    Solution solution;
    ErrorReport errors;
};

/// One stabilized Stokes solve of the manufactured case for a given body and
/// stabilization parameter. Errors are measured with volume and surface rules
/// two orders above the assembly ones.
ManufacturedRun solve_manufactured(const Mesh& mesh, const LevelSetBody& body, const Config& cfg, double gamma0,
                                   double scale = 1.0);

/// Least-squares slope of log(err) against log(h).
double fitted_rate(const std::vector<double>& h, const std::vector<double>& err);

struct ConvergenceResult {
    std::vector<ErrorReport> rows;
    double rate_u_H1 = 0.0;
    double rate_u_L2 = 0.0;
    double rate_p_L2 = 0.0;
    double rate_lambda = 0.0;
};

ConvergenceResult run_convergence(const Config& cfg, double scale = 1.0);

struct SweepRow {
    double x_c = 0.0;
    double rel_err_stab_pct = 0.0;     // +inf when the solve failed
    double rel_err_unstab_pct = 0.0;
    std::string status;                // ok, stab_singular, unstab_singular, both_singular
};

struct SweepResult {
    std::vector<SweepRow> rows;

    int failures_unstab() const;
    int failures_stab() const;
};

SweepResult run_sweep(const Config& cfg);

struct SteadyResult {
    std::unique_ptr<Mesh> mesh;
    ManufacturedRun run;
};

SteadyResult run_steady(const Config& cfg);

struct FallResult {
    std::vector<StepRecord> records;
    bool completed = false;
    std::string failure;     // message of the error that stopped the loop
    std::string failure_kind;
};

/// Called after each completed step with the simulation state.
using FallObserver = std::function<void(const FallSimulation&, const StepRecord&)>;

/// Runs the falling-body loop to time.t_end. Errors stop the loop and are
/// reported in the result; records up to that point are kept.
FallResult run_fall(const Config& cfg, const FallObserver& observer = {});

RigidBodyState initial_body_state(const Config& cfg);

/// Sampled constants of the two inverse inequalities over random finite
/// element functions supported on the elements touching the interface:
///   velocity: h ||D(v)n||^2_Γ / ||v||^2_V
///   pressure: h ||q||^2_Γ / ||q||^2_F
struct InverseConstants {
    double h = 0.0;
    double velocity = 0.0;
    double pressure = 0.0;
};

InverseConstants sample_inverse_constants(const Mesh& mesh, const LevelSetBody& body, const DiscretizationOptions& opts,
                                          int samples, std::uint64_t seed);

} // namespace xfd
