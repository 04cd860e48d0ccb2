#pragma once

#include "xfd/fem.hpp"
#include "xfd/quadrature.hpp"

#include <Eigen/Sparse>

namespace xfd {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct FluidParams {
    double nu = 1.0;
    double gamma0 = 0.05;
};

/// Sizes of the three unknown groups in the global ordering [U, P, Λ].
struct BlockLayout {
    Index nu = 0, np = 0, nl = 0;
    Index size() const { return nu + np + nl; }
    Index p_offset() const { return nu; }
    Index l_offset() const { return nu + np; }
};

enum class Block { UU, UP, UL, PP, PL, LL };

/// Stabilized Stokes operator over the fluid part of the background mesh.
///
///   [ A_uu    A_up   A_ul ] [U]
///   [ A_up^T  A_pp   A_pl ] [P]
///   [ A_ul^T  A_pl^T A_ll ] [Λ]
///
/// `mass` is the velocity mass matrix over the fluid; `pressure_weights` holds
/// the fluid integral of each pressure basis function (mean-value gauge).
/// The matrix is exactly symmetric: element matrices are built on the upper
/// triangle and mirrored.
struct SaddleSystem {
    BlockLayout layout;
    SparseMatrix matrix;
    SparseMatrix mass;
    Eigen::VectorXd pressure_weights;
    Eigen::VectorXd mean_normals;   // per multiplier slot: average n over the cell's chords
    double h = 0.0;
    double gamma = 0.0;

    SparseMatrix block(Block b) const;
};

SaddleSystem assemble_stokes(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad,
                             const FluidParams& params);

struct BoundaryData {
    VectorField f;   // volume force on F
    VectorField g;   // velocity on Γ
};

struct RightHandSide {
    Eigen::VectorXd L;   // ∫_F f·v, size nu
    Eigen::VectorXd G;   // -∫_Γ μ·g, size nl
    double flux = 0.0;   // ∮_Γ g·n with chord normals (exact Gauss identity on the polygon)
    bool compatible = true;

    Eigen::VectorXd full(const BlockLayout& layout) const;
};

RightHandSide assemble_rhs(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad, const BoundaryData& data,
                           double compat_tol = 1e-6);

/// Convective term c(u; u, v) = ∫_F (u·∇)u · v and its Jacobian in U.
struct ConvectionTerm {
    Eigen::VectorXd vector;   // N(U) U
    SparseMatrix jacobian;    // d(N(U) U)/dU
};

ConvectionTerm assemble_convection(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad,
                                   const Eigen::VectorXd& u);

/// Force -∮ λ and torque -∮ (x - c)^⊥·λ exerted by the fluid on the solid.
struct Traction {
    Vec2 force = Vec2::Zero();
    double torque = 0.0;
};

Traction traction_functionals(const QuadratureSet& quad, const Eigen::VectorXd& lambda, const Vec2& center);

} // namespace xfd
