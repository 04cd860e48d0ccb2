#pragma once

#include "xfd/common.hpp"
#include "xfd/mesh.hpp"

#include <array>
#include <variant>
#include <vector>

namespace xfd {

struct Circle {
    double radius = 0.21;
};

struct Ellipse {
    double semi_major = 0.24;
    double semi_minor = 0.08;
};

using Shape = std::variant<Circle, Ellipse>;

/// Rigid placement: the body-local frame is rotated by `angle` and centered at `center`.
struct RigidPose {
    Vec2 center = Vec2::Zero();
    double angle = 0.0;

    Mat2 rotation() const;
    Vec2 to_local(const Vec2& x) const { return rotation().transpose() * (x - center); }
    Vec2 to_global(const Vec2& y) const { return center + rotation() * y; }
    /// Composition g∘pose for a rigid map g(x) = R_g x + t_g.
    RigidPose transformed(double rot, const Vec2& shift) const;
};

/// Immersed solid described by an implicit function phi: negative inside the
/// solid, positive in the fluid, zero on the interface.
class LevelSetBody {
public:
    LevelSetBody(Shape shape, RigidPose pose);

    const Shape& shape() const { return shape_; }
    const RigidPose& pose() const { return pose_; }
    void set_pose(const RigidPose& pose) { pose_ = pose; }

    /// Circle: |x - c| - r. Ellipse: (X/a)^2 + (Y/b)^2 - 1 in the body frame.
    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    /// Unit normal pointing out of the fluid, i.e. into the solid: -grad/|grad|.
    Vec2 normal(const Vec2& x) const;

    double area() const;
    /// Semi-axes (a, b) of the equivalent ellipse; a == b for circles.
    std::array<double, 2> semi_axes() const;
    /// Axis-aligned bounding box of the solid.
    Rect bounding_box() const;

private:
    Shape shape_;
    RigidPose pose_;
};

inline double level_value(const LevelSetBody& body, const Vec2& x) { return body.value(x); }

enum class ElementClass { Fluid, Solid, Cut };

struct GeometryTolerances {
    double cut = 1e-10;   // relative to h
    double root = 1e-12;  // absolute on phi
};

/// Fluid / Solid / Cut per element.
///
/// An element is Cut when the sampled values at vertices and edge midpoints
/// change sign or come within tol.cut*h of zero. Elements whose samples are
/// all positive are additionally checked exactly: the interface may dip
/// through an edge between samples, or the whole solid may sit inside the
/// element. Both make it Cut.
std::vector<ElementClass> classify_elements(const Mesh& mesh, const LevelSetBody& body,
                                            const GeometryTolerances& tol = {});

struct InterfaceSegment {
    Index element = -1;
    Vec2 p0 = Vec2::Zero();
    Vec2 p1 = Vec2::Zero();
    Vec2 normal = Vec2::Zero(); // analytic, at the chord midpoint, into the solid

    double length() const { return (p1 - p0).norm(); }
    Vec2 midpoint() const { return 0.5 * (p0 + p1); }
    /// Unit vector perpendicular to the chord, on the same side as `normal`.
    Vec2 chord_normal() const;
};

using Triangle2 = std::array<Vec2, 3>;

/// Local geometry of one cut element: the fluid part as a list of triangles
/// and the interface as a list of chords.
struct CutCell {
    Index element = -1;
    std::vector<Triangle2> fluid_triangles;
    std::vector<InterfaceSegment> segments;

    double fluid_area() const;
    double interface_length() const;
};

/// Splits element `t` into `refinement`^2 sub-triangles and clips each one
/// against the zero level set. Chord endpoints are roots of phi on the
/// sub-triangle edges.
CutCell cut_element(const Mesh& mesh, Index t, const LevelSetBody& body, int refinement,
                    const GeometryTolerances& tol = {});

/// Everything about the immersed interface that depends on the current pose.
struct CutGeometry {
    std::vector<ElementClass> classes;
    std::vector<Index> cut_index; // element -> position in `cells`, or -1
    std::vector<CutCell> cells;
    Index demoted = 0;            // flagged Cut but no chord survived
    Index degenerate = 0;         // Cut with (near) empty fluid part

    Index num_cut() const { return static_cast<Index>(cells.size()); }
    const CutCell* cell(Index element) const {
        const Index k = cut_index[static_cast<std::size_t>(element)];
        return k < 0 ? nullptr : &cells[static_cast<std::size_t>(k)];
    }
};

CutGeometry build_cut_geometry(const Mesh& mesh, const LevelSetBody& body, int refinement,
                               const GeometryTolerances& tol = {});

/// Flattened chord list over all cut elements.
std::vector<InterfaceSegment> extract_interface(const Mesh& mesh, const LevelSetBody& body, int nseg_per_cut,
                                                const GeometryTolerances& tol = {});

} // namespace xfd
