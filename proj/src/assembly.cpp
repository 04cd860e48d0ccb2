#include "xfd/assembly.hpp"
#include "xfd/profile.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <vector>

namespace xfd {

SparseMatrix SaddleSystem::block(Block b) const {
    const Index nu = layout.nu, np = layout.np, nl = layout.nl;
    const Index po = layout.p_offset(), lo = layout.l_offset();
    switch (b) {
    case Block::UU: return matrix.block(0, 0, nu, nu);
    case Block::UP: return matrix.block(0, po, nu, np);
    case Block::UL: return matrix.block(0, lo, nu, nl);
    case Block::PP: return matrix.block(po, po, np, np);
    case Block::PL: return matrix.block(po, lo, np, nl);
    case Block::LL: return matrix.block(lo, lo, nl, nl);
    }
    return {};
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Local unknowns of one element: 2 per velocity node, 1 per pressure node,
// and 2 multiplier slots when the element is cut.
struct LocalLayout {
    int nphi = 0, npsi = 0, nlam = 0;
    std::vector<Index> global;

    int size() const { return 2 * nphi + npsi + nlam; }
    int u(int a, int c) const { return 2 * a + c; }
    int p(int k) const { return 2 * nphi + k; }
    int l(int c) const { return 2 * nphi + npsi + c; }
};

LocalLayout local_layout(const DofMap& dofs, Index element, Index cut) {
    LocalLayout loc;
    loc.nphi = dofs.velocity.nodes_per_element();
    loc.npsi = dofs.pressure.nodes_per_element();
    loc.nlam = cut >= 0 ? 2 : 0;
    loc.global.resize(static_cast<std::size_t>(loc.size()));
    const auto& vn = dofs.velocity.element_nodes[static_cast<std::size_t>(element)];
    const auto& pn = dofs.pressure.element_nodes[static_cast<std::size_t>(element)];
    for (int a = 0; a < loc.nphi; ++a)
        for (int c = 0; c < 2; ++c) loc.global[static_cast<std::size_t>(loc.u(a, c))] = dofs.u_dof(vn[static_cast<std::size_t>(a)], c);
    for (int k = 0; k < loc.npsi; ++k) loc.global[static_cast<std::size_t>(loc.p(k))] = dofs.p_dof(pn[static_cast<std::size_t>(k)]);
    for (int c = 0; c < loc.nlam; ++c) loc.global[static_cast<std::size_t>(loc.l(c))] = dofs.lambda_dof(cut, c);
    return loc;
}

void scatter(const LocalLayout& loc, const Eigen::MatrixXd& local, Triplets& out) {
    for (int i = 0; i < loc.size(); ++i) {
        const Index gi = loc.global[static_cast<std::size_t>(i)];
        if (gi < 0) continue;
        for (int j = 0; j < loc.size(); ++j) {
            const Index gj = loc.global[static_cast<std::size_t>(j)];
            if (gj < 0 || local(i, j) == 0.0) continue;
            out.emplace_back(gi, gj, local(i, j));
        }
    }
}

} // namespace

SaddleSystem assemble_stokes(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad,
                             const FluidParams& params) {
    if (dofs.num_u() == 0) throw EmptyFluid("no retained velocity degree of freedom");
    XFD_REQUIRE(params.nu > 0.0, InvalidArgument, "viscosity must be positive");
    XFD_REQUIRE(params.gamma0 >= 0.0, InvalidArgument, "gamma0 must be non-negative");

    SaddleSystem sys;
    sys.layout = {dofs.num_u(), dofs.num_p(), dofs.num_lambda()};
    sys.h = mesh.h();
    sys.gamma = params.gamma0 * sys.h;
    sys.pressure_weights = Eigen::VectorXd::Zero(sys.layout.np);
    const double nu = params.nu;
    const double gamma = sys.gamma;

    // Cut element -> cut index.
    std::vector<Index> cut_of(static_cast<std::size_t>(mesh.num_triangles()), -1);
    for (std::size_t k = 0; k < dofs.multiplier_elements.size(); ++k)
        cut_of[static_cast<std::size_t>(dofs.multiplier_elements[k])] = static_cast<Index>(k);

    Triplets trip, mass_trip;
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const Index cut = cut_of[static_cast<std::size_t>(t)];
        const VolumeRule& vr = quad.volume[static_cast<std::size_t>(t)];
        if (vr.empty() && cut < 0) continue;

        const LocalLayout loc = local_layout(dofs, t, cut);
        const ElementMap map(mesh.vertices(t));
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(loc.size(), loc.size());
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * loc.nphi, 2 * loc.nphi);

        // Upper triangle only; mirrored below so the element matrix is exactly symmetric.
        for (std::size_t q = 0; q < vr.points.size(); ++q) {
            const Vec2 ref = map.to_reference(vr.points[q]);
            const double w = vr.weights[q];
            const BasisValues phi = eval_basis(dofs.config.k_u, map, ref);
            const BasisValues psi = eval_basis(dofs.config.k_p, map, ref);
            for (int a = 0; a < loc.nphi; ++a) {
                const Vec2& ga = phi.grads[static_cast<std::size_t>(a)];
                for (int c = 0; c < 2; ++c) {
                    const int i = loc.u(a, c);
                    for (int b = 0; b < loc.nphi; ++b) {
                        const Vec2& gb = phi.grads[static_cast<std::size_t>(b)];
                        for (int d = 0; d < 2; ++d) {
                            const int j = loc.u(b, d);
                            if (j < i) continue;
                            const double delta = c == d ? ga.dot(gb) : 0.0;
                            K(i, j) += nu * w * (delta + ga[d] * gb[c]);
                            if (c == d) M(i, j) += w * phi.values[static_cast<std::size_t>(a)] * phi.values[static_cast<std::size_t>(b)];
                        }
                    }
                    for (int k = 0; k < loc.npsi; ++k)
                        K(i, loc.p(k)) -= w * psi.values[static_cast<std::size_t>(k)] * ga[c];
                }
            }
            for (int k = 0; k < loc.npsi; ++k) {
                const Index r = loc.global[static_cast<std::size_t>(loc.p(k))];
                sys.pressure_weights[r - sys.layout.p_offset()] += w * psi.values[static_cast<std::size_t>(k)];
            }
        }

        if (cut >= 0) {
            // -γ ∫ s_i·s_j with s = 2ν D(v)n - q n - μ per basis function, and
            // the coupling -∫ (λ·v + μ·u).
            std::vector<Vec2> s(static_cast<std::size_t>(loc.size()));
            for (const SurfaceRule& sr : quad.surface[static_cast<std::size_t>(cut)]) {
                for (std::size_t q = 0; q < sr.points.size(); ++q) {
                    const Vec2 ref = map.to_reference(sr.points[q]);
                    const double w = sr.weights[q];
                    const Vec2& n = sr.normals[q];
                    const BasisValues phi = eval_basis(dofs.config.k_u, map, ref);
                    const BasisValues psi = eval_basis(dofs.config.k_p, map, ref);
                    for (int a = 0; a < loc.nphi; ++a) {
                        const Vec2& ga = phi.grads[static_cast<std::size_t>(a)];
                        const double gn = ga.dot(n);
                        for (int c = 0; c < 2; ++c) {
                            Vec2 e = Vec2::Zero();
                            e[c] = gn;
                            s[static_cast<std::size_t>(loc.u(a, c))] = nu * (e + ga * n[c]);
                        }
                    }
                    for (int k = 0; k < loc.npsi; ++k) s[static_cast<std::size_t>(loc.p(k))] = -psi.values[static_cast<std::size_t>(k)] * n;
                    s[static_cast<std::size_t>(loc.l(0))] = Vec2(-1.0, 0.0);
                    s[static_cast<std::size_t>(loc.l(1))] = Vec2(0.0, -1.0);

                    if (gamma != 0.0) {
                        for (int i = 0; i < loc.size(); ++i)
                            for (int j = i; j < loc.size(); ++j)
                                K(i, j) -= gamma * w * s[static_cast<std::size_t>(i)].dot(s[static_cast<std::size_t>(j)]);
                    }
                    for (int a = 0; a < loc.nphi; ++a)
                        for (int c = 0; c < 2; ++c)
                            K(loc.u(a, c), loc.l(c)) -= w * phi.values[static_cast<std::size_t>(a)];
                }
            }
        }

        for (int i = 0; i < loc.size(); ++i)
            for (int j = 0; j < i; ++j) K(i, j) = K(j, i);
        for (int i = 0; i < M.rows(); ++i)
            for (int j = 0; j < i; ++j) M(i, j) = M(j, i);

        scatter(loc, K, trip);
        for (int i = 0; i < M.rows(); ++i)
            for (int j = 0; j < M.cols(); ++j)
                if (M(i, j) != 0.0) mass_trip.emplace_back(loc.global[static_cast<std::size_t>(i)], loc.global[static_cast<std::size_t>(j)], M(i, j));
    }

    sys.mean_normals = Eigen::VectorXd::Zero(sys.layout.nl);
    for (std::size_t k = 0; k < quad.surface.size(); ++k) {
        Vec2 acc = Vec2::Zero();
        double len = 0.0;
        for (const SurfaceRule& sr : quad.surface[k])
            for (std::size_t q = 0; q < sr.points.size(); ++q) {
                acc += sr.weights[q] * sr.normals[q];
                len += sr.weights[q];
            }
        if (len > 0.0) sys.mean_normals.segment<2>(static_cast<Index>(2 * k)) = acc / len;
    }

    sys.matrix.resize(sys.layout.size(), sys.layout.size());
    sys.matrix.setFromTriplets(trip.begin(), trip.end());
    sys.mass.resize(sys.layout.nu, sys.layout.nu);
    sys.mass.setFromTriplets(mass_trip.begin(), mass_trip.end());
    return sys;
}

Eigen::VectorXd RightHandSide::full(const BlockLayout& layout) const {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(layout.size());
    b.head(layout.nu) = L;
    b.tail(layout.nl) = G;
    return b;
}

RightHandSide assemble_rhs(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad, const BoundaryData& data,
                           double compat_tol) {
    ScopedTimer timer("assemble");
    RightHandSide rhs;
    rhs.L = Eigen::VectorXd::Zero(dofs.num_u());
    rhs.G = Eigen::VectorXd::Zero(dofs.num_lambda());

    if (data.f) {
        for (Index t = 0; t < mesh.num_triangles(); ++t) {
            const VolumeRule& vr = quad.volume[static_cast<std::size_t>(t)];
            if (vr.empty()) continue;
            const ElementMap map(mesh.vertices(t));
            const auto& vn = dofs.velocity.element_nodes[static_cast<std::size_t>(t)];
            for (std::size_t q = 0; q < vr.points.size(); ++q) {
                const BasisValues phi = eval_basis(dofs.config.k_u, map, map.to_reference(vr.points[q]));
                const Vec2 f = data.f(vr.points[q]);
                for (int a = 0; a < phi.n; ++a) {
                    const Index d0 = dofs.u_dof(vn[static_cast<std::size_t>(a)], 0);
                    rhs.L[d0] += vr.weights[q] * f.x() * phi.values[static_cast<std::size_t>(a)];
                    rhs.L[d0 + 1] += vr.weights[q] * f.y() * phi.values[static_cast<std::size_t>(a)];
                }
            }
        }
    }

    double scale = 0.0;
    if (data.g) {
        for (std::size_t k = 0; k < quad.surface.size(); ++k) {
            for (const SurfaceRule& sr : quad.surface[k]) {
                for (std::size_t q = 0; q < sr.points.size(); ++q) {
                    const Vec2 g = data.g(sr.points[q]);
                    rhs.G[static_cast<Index>(2 * k)] -= sr.weights[q] * g.x();
                    rhs.G[static_cast<Index>(2 * k + 1)] -= sr.weights[q] * g.y();
                    rhs.flux += sr.weights[q] * g.dot(sr.chord_normal);
                    scale += sr.weights[q] * g.norm();
                }
            }
        }
    }
    if (std::abs(rhs.flux) > compat_tol * scale) {
        rhs.compatible = false;
        spdlog::warn("interface datum not compatible: |flux| = {:.3e} exceeds {:.1e} * {:.3e}", std::abs(rhs.flux),
                     compat_tol, scale);
    }
    return rhs;
}

ConvectionTerm assemble_convection(const Mesh& mesh, const DofMap& dofs, const QuadratureSet& quad,
                                   const Eigen::VectorXd& u) {
    ScopedTimer timer("assemble");
    ConvectionTerm out;
    out.vector = Eigen::VectorXd::Zero(dofs.num_u());
    Triplets trip;
    const int nphi = dofs.velocity.nodes_per_element();
    std::vector<Index> gd(static_cast<std::size_t>(2 * nphi));
    Eigen::MatrixXd J(2 * nphi, 2 * nphi);

    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const VolumeRule& vr = quad.volume[static_cast<std::size_t>(t)];
        if (vr.empty()) continue;
        const ElementMap map(mesh.vertices(t));
        const auto& vn = dofs.velocity.element_nodes[static_cast<std::size_t>(t)];
        for (int a = 0; a < nphi; ++a)
            for (int c = 0; c < 2; ++c) gd[static_cast<std::size_t>(2 * a + c)] = dofs.u_dof(vn[static_cast<std::size_t>(a)], c);
        J.setZero();
        for (std::size_t q = 0; q < vr.points.size(); ++q) {
            const BasisValues phi = eval_basis(dofs.config.k_u, map, map.to_reference(vr.points[q]));
            const double w = vr.weights[q];
            Vec2 uq = Vec2::Zero();
            Mat2 gu = Mat2::Zero();
            for (int a = 0; a < nphi; ++a) {
                const Vec2 ua(u[gd[static_cast<std::size_t>(2 * a)]], u[gd[static_cast<std::size_t>(2 * a + 1)]]);
                uq += phi.values[static_cast<std::size_t>(a)] * ua;
                gu += ua * phi.grads[static_cast<std::size_t>(a)].transpose();
            }
            const Vec2 conv = gu * uq;  // (u·∇)u
            for (int a = 0; a < nphi; ++a) {
                const double pa = w * phi.values[static_cast<std::size_t>(a)];
                for (int c = 0; c < 2; ++c) out.vector[gd[static_cast<std::size_t>(2 * a + c)]] += pa * conv[c];
                for (int b = 0; b < nphi; ++b) {
                    const double pb = phi.values[static_cast<std::size_t>(b)];
                    const double adv = uq.dot(phi.grads[static_cast<std::size_t>(b)]);
                    for (int c = 0; c < 2; ++c)
                        for (int d = 0; d < 2; ++d)
                            J(2 * a + c, 2 * b + d) += pa * (pb * gu(c, d) + (c == d ? adv : 0.0));
                }
            }
        }
        for (int i = 0; i < 2 * nphi; ++i)
            for (int j = 0; j < 2 * nphi; ++j)
                if (J(i, j) != 0.0) trip.emplace_back(gd[static_cast<std::size_t>(i)], gd[static_cast<std::size_t>(j)], J(i, j));
    }
    out.jacobian.resize(dofs.num_u(), dofs.num_u());
    out.jacobian.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Traction traction_functionals(const QuadratureSet& quad, const Eigen::VectorXd& lambda, const Vec2& center) {
    Traction tr;
    for (std::size_t k = 0; k < quad.surface.size(); ++k) {
        const Vec2 lam(lambda[static_cast<Index>(2 * k)], lambda[static_cast<Index>(2 * k + 1)]);
        for (const SurfaceRule& sr : quad.surface[k]) {
            for (std::size_t q = 0; q < sr.points.size(); ++q) {
                tr.force -= sr.weights[q] * lam;
                tr.torque -= sr.weights[q] * perp(sr.points[q] - center).dot(lam);
            }
        }
    }
    return tr;
}

} // namespace xfd
