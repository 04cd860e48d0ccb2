#pragma once

#include "xfd/assembly.hpp"

namespace xfd {

struct DiscretizationOptions {
    SpaceConfig space;
    int nseg_per_cut = 4;
    int volume_order = 4;
    int surface_order = 3;
    NormalMode normals = NormalMode::Analytic;
    GeometryTolerances tol;
};

/// Cut geometry, dof map, quadrature and Stokes matrix for one pose.
struct Discretization {
    CutGeometry geo;
    DofMap dofs;
    QuadratureSet quad;
    SaddleSystem system;
};

Discretization discretize(const Mesh& mesh, const LevelSetBody& body, const DiscretizationOptions& opts,
                          const FluidParams& fluid);

} // namespace xfd
