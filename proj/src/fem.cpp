#include "xfd/fem.hpp"

#include <algorithm>

namespace xfd {

Index ScalarSpace::count(DofStatus s) const {
    return static_cast<Index>(std::count(status.begin(), status.end(), s));
}

namespace {

ScalarSpace build_space(const Mesh& mesh, const CutGeometry& geo, const LevelSetBody& body, int degree) {
    XFD_REQUIRE(degree == 1 || degree == 2, InvalidArgument, "only P1 and P2 Lagrange spaces are available");
    ScalarSpace sp;
    sp.degree = degree;
    const Index nv = mesh.num_nodes();
    const Index n_nodes = degree == 1 ? nv : nv + mesh.num_edges();

    sp.coords.resize(static_cast<std::size_t>(n_nodes));
    sp.on_boundary.assign(static_cast<std::size_t>(n_nodes), 0);
    for (Index i = 0; i < nv; ++i) {
        sp.coords[static_cast<std::size_t>(i)] = mesh.node(i);
        sp.on_boundary[static_cast<std::size_t>(i)] = mesh.on_boundary(i) ? 1 : 0;
    }
    if (degree == 2) {
        for (Index e = 0; e < mesh.num_edges(); ++e) {
            const auto& ed = mesh.edge(e);
            sp.coords[static_cast<std::size_t>(nv + e)] = 0.5 * (mesh.node(ed[0]) + mesh.node(ed[1]));
            sp.on_boundary[static_cast<std::size_t>(nv + e)] = mesh.edge_on_boundary(e) ? 1 : 0;
        }
    }

    // Elements touching each node; a node survives if any of them is not Solid.
    std::vector<char> touches_fluid(static_cast<std::size_t>(n_nodes), 0);
    sp.element_nodes.resize(static_cast<std::size_t>(mesh.num_triangles()));
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        auto& en = sp.element_nodes[static_cast<std::size_t>(t)];
        en.fill(-1);
        const auto& tri = mesh.triangle(t);
        for (int k = 0; k < 3; ++k) en[static_cast<std::size_t>(k)] = tri[static_cast<std::size_t>(k)];
        if (degree == 2)
            for (int k = 0; k < 3; ++k)
                en[static_cast<std::size_t>(3 + k)] = nv + mesh.triangle_edges(t)[static_cast<std::size_t>(k)];
        if (geo.classes[static_cast<std::size_t>(t)] != ElementClass::Solid)
            for (int k = 0; k < sp.nodes_per_element(); ++k) touches_fluid[static_cast<std::size_t>(en[static_cast<std::size_t>(k)])] = 1;
    }

    sp.status.resize(static_cast<std::size_t>(n_nodes));
    sp.index.assign(static_cast<std::size_t>(n_nodes), -1);
    for (Index i = 0; i < n_nodes; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!touches_fluid[k]) {
            sp.status[k] = DofStatus::Eliminated;
            continue;
        }
        sp.status[k] = body.value(sp.coords[k]) < 0.0 ? DofStatus::Virtual : DofStatus::Standard;
        sp.index[k] = static_cast<Index>(sp.retained_nodes.size());
        sp.retained_nodes.push_back(i);
    }
    return sp;
}

} // namespace

DofMap build_dof_map(const Mesh& mesh, const CutGeometry& geo, const LevelSetBody& body, const SpaceConfig& cfg) {
    XFD_REQUIRE(cfg.k_u >= 1, InvalidArgument, "velocity degree must be >= 1");
    DofMap d;
    d.config = cfg;
    d.velocity = build_space(mesh, geo, body, cfg.k_u);
    d.pressure = build_space(mesh, geo, body, cfg.k_p);
    d.multiplier_elements.reserve(geo.cells.size());
    for (const auto& c : geo.cells) d.multiplier_elements.push_back(c.element);
    return d;
}

ElementMap::ElementMap(const std::array<Vec2, 3>& v) : origin(v[0]) {
    jacobian.col(0) = v[1] - v[0];
    jacobian.col(1) = v[2] - v[0];
    inv_transpose = jacobian.inverse().transpose();
}

BasisValues reference_basis(int degree, const Vec2& ref) {
    BasisValues b;
    const double xi = ref.x();
    const double eta = ref.y();
    const double l0 = 1.0 - xi - eta;
    const Vec2 g0(-1.0, -1.0), g1(1.0, 0.0), g2(0.0, 1.0);
    if (degree == 1) {
        b.n = 3;
        b.values = {l0, xi, eta, 0, 0, 0};
        b.grads[0] = g0;
        b.grads[1] = g1;
        b.grads[2] = g2;
        return b;
    }
    b.n = 6;
    const std::array<double, 3> l{l0, xi, eta};
    const std::array<Vec2, 3> g{g0, g1, g2};
    for (std::size_t k = 0; k < 3; ++k) {
        b.values[k] = l[k] * (2.0 * l[k] - 1.0);
        b.grads[k] = (4.0 * l[k] - 1.0) * g[k];
        const std::size_t k1 = (k + 1) % 3;
        b.values[3 + k] = 4.0 * l[k] * l[k1];
        b.grads[3 + k] = 4.0 * (l[k] * g[k1] + l[k1] * g[k]);
    }
    return b;
}

BasisValues eval_basis(int degree, const ElementMap& map, const Vec2& ref) {
    BasisValues b = reference_basis(degree, ref);
    for (int k = 0; k < b.n; ++k) b.grads[static_cast<std::size_t>(k)] = map.inv_transpose * b.grads[static_cast<std::size_t>(k)];
    return b;
}

ElementBasis eval_basis(const Mesh& mesh, Index element, const Vec2& ref, const SpaceConfig& cfg) {
    const ElementMap map(mesh.vertices(element));
    return {eval_basis(cfg.k_u, map, ref), eval_basis(cfg.k_p, map, ref)};
}

FieldVector interpolate_velocity(const VectorField& fn, const DofMap& dofs) {
    FieldVector f{FieldRole::Velocity, Eigen::VectorXd::Zero(dofs.num_u())};
    for (Index r = 0; r < dofs.velocity.num_retained(); ++r) {
        const Vec2 v = fn(dofs.velocity.coords[static_cast<std::size_t>(dofs.velocity.retained_nodes[static_cast<std::size_t>(r)])]);
        f.values[2 * r] = v.x();
        f.values[2 * r + 1] = v.y();
    }
    return f;
}

FieldVector interpolate_pressure(const ScalarField& fn, const DofMap& dofs) {
    FieldVector f{FieldRole::Pressure, Eigen::VectorXd::Zero(dofs.num_p())};
    for (Index r = 0; r < dofs.pressure.num_retained(); ++r)
        f.values[r] = fn(dofs.pressure.coords[static_cast<std::size_t>(dofs.pressure.retained_nodes[static_cast<std::size_t>(r)])]);
    return f;
}

FieldVector interpolate_multiplier(const VectorField& fn, const DofMap& dofs, const CutGeometry& geo) {
    FieldVector f{FieldRole::Multiplier, Eigen::VectorXd::Zero(dofs.num_lambda())};
    for (std::size_t k = 0; k < geo.cells.size(); ++k) {
        Vec2 acc = Vec2::Zero();
        double len = 0.0;
        for (const auto& s : geo.cells[k].segments) {
            acc += s.length() * fn(s.midpoint());
            len += s.length();
        }
        if (len > 0.0) acc /= len;
        f.values[static_cast<Index>(2 * k)] = acc.x();
        f.values[static_cast<Index>(2 * k + 1)] = acc.y();
    }
    return f;
}

VelocitySample eval_velocity(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u, Index element,
                             const Vec2& x) {
    const ElementMap map(mesh.vertices(element));
    const BasisValues b = eval_basis(dofs.config.k_u, map, map.to_reference(x));
    const auto& nodes = dofs.velocity.element_nodes[static_cast<std::size_t>(element)];
    VelocitySample s;
    for (int a = 0; a < b.n; ++a) {
        const Index node = nodes[static_cast<std::size_t>(a)];
        const Index d0 = dofs.u_dof(node, 0);
        if (d0 < 0) continue;
        const Vec2 val(u[d0], u[d0 + 1]);
        s.value += b.values[static_cast<std::size_t>(a)] * val;
        s.grad += val * b.grads[static_cast<std::size_t>(a)].transpose();
    }
    return s;
}

double eval_pressure(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& p, Index element, const Vec2& x) {
    const ElementMap map(mesh.vertices(element));
    const BasisValues b = eval_basis(dofs.config.k_p, map, map.to_reference(x));
    const auto& nodes = dofs.pressure.element_nodes[static_cast<std::size_t>(element)];
    double v = 0.0;
    for (int a = 0; a < b.n; ++a) {
        const Index r = dofs.pressure.index[static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
        if (r >= 0) v += b.values[static_cast<std::size_t>(a)] * p[r];
    }
    return v;
}

} // namespace xfd
