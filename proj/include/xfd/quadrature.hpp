#pragma once

#include "xfd/geometry.hpp"
#include "xfd/mesh.hpp"

#include <vector>

namespace xfd {

/// Gauss-Legendre nodes and weights on [0, 1].
struct LineRule {
    std::vector<double> points;
    std::vector<double> weights;
};
LineRule gauss_legendre(int npoints);

/// Rule on the reference triangle {xi, eta >= 0, xi + eta <= 1}, weights sum to 1/2.
struct ReferenceTriangleRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
};
/// Collapsed (Duffy) tensor Gauss rule, exact for polynomials of total degree `order`.
ReferenceTriangleRule triangle_rule(int order);

struct VolumeRule {
    Index element = -1;
    std::vector<Vec2> points;   // physical coordinates
    std::vector<double> weights;

    double total_weight() const;
    bool empty() const { return points.empty(); }
};

struct SurfaceRule {
    Index element = -1;
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;  // into the solid
    Vec2 chord_normal = Vec2::Zero();

    double total_weight() const;
};

enum class NormalMode {
    Analytic,  // -grad(phi)/|grad(phi)| at each quadrature point
    Chord,     // constant, perpendicular to the chord
};

/// Rule over T ∩ F. Fluid elements get the mapped reference rule, Solid
/// elements nothing, Cut elements one mapped rule per fluid sub-triangle.
VolumeRule fluid_volume_rule(const Mesh& mesh, const CutGeometry& geo, Index element, int order);

SurfaceRule surface_rule(const InterfaceSegment& segment, const LevelSetBody& body, int order,
                         NormalMode mode = NormalMode::Analytic);

/// All rules for the current pose.
struct QuadratureSet {
    std::vector<VolumeRule> volume;                  // one per element (empty for Solid)
    std::vector<std::vector<SurfaceRule>> surface;   // per cut cell, one per segment
    int volume_order = 4;
    int surface_order = 3;
};

QuadratureSet build_quadrature(const Mesh& mesh, const CutGeometry& geo, const LevelSetBody& body,
                               int volume_order, int surface_order, NormalMode mode = NormalMode::Analytic);

/// Sum of all volume weights, i.e. the discrete |F|.
double fluid_area(const QuadratureSet& q);
/// Sum of all surface weights, i.e. the discrete |Γ|.
double interface_length(const QuadratureSet& q);

} // namespace xfd
