#include "xfd/discretization.hpp"
#include "xfd/profile.hpp"

namespace xfd {

Discretization discretize(const Mesh& mesh, const LevelSetBody& body, const DiscretizationOptions& opts,
                          const FluidParams& fluid) {
    Discretization d;
    {
        ScopedTimer t("classify");
        d.geo = build_cut_geometry(mesh, body, opts.nseg_per_cut, opts.tol);
        d.dofs = build_dof_map(mesh, d.geo, body, opts.space);
    }
    {
        ScopedTimer t("quadrature");
        d.quad = build_quadrature(mesh, d.geo, body, opts.volume_order, opts.surface_order, opts.normals);
    }
    {
        ScopedTimer t("assemble");
        d.system = assemble_stokes(mesh, d.dofs, d.quad, fluid);
    }
    return d;
}

} // namespace xfd
