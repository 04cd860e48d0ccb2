#pragma once

#include "xfd/common.hpp"
#include "xfd/geometry.hpp"
#include "xfd/mesh.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <vector>

namespace xfd {

/// Polynomial degrees of the velocity / pressure Lagrange spaces. The
/// multiplier is always one constant 2-vector per cut element.
struct SpaceConfig {
    int k_u = 2;
    int k_p = 1;
};

enum class DofStatus { Standard, Virtual, Eliminated };

/// Scalar Lagrange space of degree 1 or 2 on the background mesh. Nodes are
/// the mesh vertices, followed (degree 2) by one node per mesh edge.
struct ScalarSpace {
    int degree = 1;
    std::vector<Vec2> coords;                 // per node
    std::vector<std::array<Index, 6>> element_nodes;
    std::vector<DofStatus> status;            // per node
    std::vector<Index> index;                 // node -> retained index, -1 if eliminated
    std::vector<Index> retained_nodes;        // retained index -> node
    std::vector<char> on_boundary;            // node lies on the outer boundary

    int nodes_per_element() const { return degree == 1 ? 3 : 6; }
    Index num_nodes() const { return static_cast<Index>(coords.size()); }
    Index num_retained() const { return static_cast<Index>(retained_nodes.size()); }
    Index count(DofStatus s) const;
};

/// Global numbering of the unknowns (U, P, Λ) restricted to the fluid.
///
/// Layout of the global vector: velocity dofs 2*i + c for retained velocity
/// node i and component c, then pressure dofs, then two multiplier slots per
/// cut element.
class DofMap {
public:
    SpaceConfig config;
    ScalarSpace velocity;
    ScalarSpace pressure;
    std::vector<Index> multiplier_elements;   // cut cell k -> element

    Index num_u() const { return 2 * velocity.num_retained(); }
    Index num_p() const { return pressure.num_retained(); }
    Index num_lambda() const { return 2 * static_cast<Index>(multiplier_elements.size()); }
    Index size() const { return num_u() + num_p() + num_lambda(); }

    Index u_dof(Index node, int comp) const {
        const Index r = velocity.index[static_cast<std::size_t>(node)];
        return r < 0 ? -1 : 2 * r + comp;
    }
    Index p_dof(Index node) const {
        const Index r = pressure.index[static_cast<std::size_t>(node)];
        return r < 0 ? -1 : num_u() + r;
    }
    Index lambda_dof(Index cut, int comp) const { return num_u() + num_p() + 2 * cut + comp; }
};

DofMap build_dof_map(const Mesh& mesh, const CutGeometry& geo, const LevelSetBody& body, const SpaceConfig& cfg = {});

/// Values and physical gradients of the scalar Lagrange basis of one element.
struct BasisValues {
    int n = 0;
    std::array<double, 6> values{};
    std::array<Vec2, 6> grads{};
};

/// Affine map of an element from the reference triangle.
struct ElementMap {
    Vec2 origin;
    Mat2 jacobian;        // columns: v1 - v0, v2 - v0
    Mat2 inv_transpose;   // J^{-T}

    explicit ElementMap(const std::array<Vec2, 3>& v);
    Vec2 to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
    Vec2 to_reference(const Vec2& x) const { return inv_transpose.transpose() * (x - origin); }
};

/// Lagrange basis of `degree` at reference point (xi, eta). Local ordering:
/// vertices 0..2, then (degree 2) midpoints of edges v0v1, v1v2, v2v0.
BasisValues reference_basis(int degree, const Vec2& ref);
BasisValues eval_basis(int degree, const ElementMap& map, const Vec2& ref);

struct ElementBasis {
    BasisValues velocity;
    BasisValues pressure;
};
ElementBasis eval_basis(const Mesh& mesh, Index element, const Vec2& ref, const SpaceConfig& cfg);

enum class FieldRole { Velocity, Pressure, Multiplier };

struct FieldVector {
    FieldRole role = FieldRole::Velocity;
    Eigen::VectorXd values;
};

using VectorField = std::function<Vec2(const Vec2&)>;
using ScalarField = std::function<double(const Vec2&)>;

FieldVector interpolate_velocity(const VectorField& fn, const DofMap& dofs);
FieldVector interpolate_pressure(const ScalarField& fn, const DofMap& dofs);
/// Length-weighted average of fn at the chord midpoints of each cut element.
FieldVector interpolate_multiplier(const VectorField& fn, const DofMap& dofs, const CutGeometry& geo);

/// Value and gradient (rows: components) of a velocity field inside `element`.
struct VelocitySample {
    Vec2 value = Vec2::Zero();
    Mat2 grad = Mat2::Zero();   // grad(i, j) = d u_i / d x_j
};
VelocitySample eval_velocity(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& u, Index element,
                             const Vec2& x);
double eval_pressure(const Mesh& mesh, const DofMap& dofs, const Eigen::VectorXd& p, Index element, const Vec2& x);

/// D(v) = (grad v + grad v^T) / 2.
inline Mat2 sym_grad(const Mat2& g) { return 0.5 * (g + g.transpose()); }

} // namespace xfd
