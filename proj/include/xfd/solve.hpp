#pragma once

#include "xfd/assembly.hpp"

#include <functional>
#include <vector>

namespace xfd {

enum class PressureGauge {
    MeanZero, // bordered constraint row: fluid mean of p is zero
    PinOne,   // first standard pressure dof fixed to 0, then shifted to zero mean
};

struct SolveOptions {
    double newton_abs_tol = 1e-10;
    double newton_rel_tol = 1e-8;
    int newton_max_iter = 20;
    int line_search_max = 6;      // halvings per Newton step
    PressureGauge gauge = PressureGauge::MeanZero;
};

/// Prescribed values on a subset of the global unknowns (outer boundary
/// velocity). Those unknowns are removed from the linear system.
struct DirichletData {
    std::vector<Index> dofs;
    std::vector<double> values;
};

/// Velocity nodes on the outer boundary, prescribed to `g` (zero when empty).
DirichletData outer_dirichlet(const DofMap& dofs, const VectorField& g = {});

struct Solution {
    BlockLayout layout;
    Eigen::VectorXd x;            // [U, P, Λ]
    int iterations = 0;           // linear solves performed
    double residual = 0.0;        // final residual norm (linear or nonlinear)
    std::vector<double> residual_history;

    FieldVector U() const { return {FieldRole::Velocity, x.head(layout.nu)}; }
    FieldVector P() const { return {FieldRole::Pressure, x.segment(layout.p_offset(), layout.np)}; }
    FieldVector Lambda() const { return {FieldRole::Multiplier, x.tail(layout.nl)}; }
};

/// Direct solve of the stabilized Stokes system with right-hand side `rhs`
/// (full length, see RightHandSide::full).
Solution solve_stokes(const SaddleSystem& system, const Eigen::VectorXd& rhs, const DirichletData& bc,
                      const SolveOptions& opts = {});

/// One backward-Euler step of the Navier-Stokes system on a fixed geometry:
///   M (U - U_prev)/dt + A_uu U + N(U)U + A_up P + A_ul Λ = L
///   the pressure and multiplier rows of the Stokes system unchanged.
struct TransientProblem {
    const SaddleSystem* system = nullptr;
    Eigen::VectorXd rhs;                   // full length
    DirichletData bc;
    Eigen::VectorXd u_prev;                // size nu
    double dt = 1e-3;
    /// Convective term; empty disables convection (Stokes limit).
    std::function<ConvectionTerm(const Eigen::VectorXd&)> convection;
};

Solution solve_navier_stokes_step(const TransientProblem& problem, const Eigen::VectorXd& guess,
                                  const SolveOptions& opts = {});

/// Analytic reference fields for error measurement.
struct ExactSolution {
    VectorField u;
    std::function<Mat2(const Vec2&)> grad_u;  // (i, j) = d u_i / d x_j
    ScalarField p;
};

struct ErrorReport {
    double h = 0.0;
    double err_u_H1 = 0.0;
    double err_u_L2 = 0.0;
    double err_p_L2 = 0.0;
    double err_lambda_L2 = 0.0;   // on Γ
    double lambda_norm = 0.0;     // ||λ_exact|| on Γ
    double triple_norm_err = 0.0;

    double rel_lambda() const { return lambda_norm > 0.0 ? err_lambda_L2 / lambda_norm : 0.0; }
};

/// Squared contributions of the mesh-dependent norm
/// |||u,p,λ|||^2 = ||u||_V^2 + ||p||^2 + h||D(u)n||_Γ^2 + h||p||_Γ^2 + h||λ||_Γ^2 + ||u||_Γ^2 / h.
struct TripleNormParts {
    double u_V2 = 0.0, p_F2 = 0.0, Dun_G2 = 0.0, p_G2 = 0.0, lambda_G2 = 0.0, u_G2 = 0.0;
    double value(double h) const;
};

/// Error of the discrete solution against `exact`, with λ_exact = 2νD(u)n - pn.
/// `quad` should be finer than the assembly rules; it must come from the same
/// cut geometry as `dofs`.
ErrorReport compute_errors(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad, const Solution& sol,
                           const ExactSolution& exact, double nu);

} // namespace xfd
