#include "xfd/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace xfd {

LineRule gauss_legendre(int npoints) {
    XFD_REQUIRE(npoints >= 1, InvalidArgument, "gauss_legendre: npoints must be >= 1");
    const int n = npoints;
    LineRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p_prev = 1.0, p = x;
            for (int k = 2; k <= n; ++k) {
                const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
                p_prev = p;
                p = p_next;
            }
            dp = n * (x * p - p_prev) / (x * x - 1.0);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1], ascending.
        const auto k = static_cast<std::size_t>(n - 1 - i);
        rule.points[k] = 0.5 * (x + 1.0);
        rule.weights[k] = 0.5 * w;
    }
    return rule;
}

ReferenceTriangleRule triangle_rule(int order) {
    XFD_REQUIRE(order >= 0, InvalidArgument, "triangle_rule: order must be >= 0");
    // Degree d in (xi, eta) becomes degree d + 1 in the collapsed variable once
    // the Jacobian (1 - s) is included; n Gauss points integrate 2n - 1 exactly.
    const int n = std::max(1, (order + 2 + 1) / 2);
    const LineRule g = gauss_legendre(n);
    ReferenceTriangleRule rule;
    for (int i = 0; i < n; ++i) {
        const double s = g.points[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double t = g.points[static_cast<std::size_t>(j)];
            rule.points.emplace_back(s, t * (1.0 - s));
            rule.weights.push_back(g.weights[static_cast<std::size_t>(i)] * g.weights[static_cast<std::size_t>(j)] *
                                   (1.0 - s));
        }
    }
    return rule;
}

double VolumeRule::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
double SurfaceRule::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

namespace {

void append_mapped(VolumeRule& out, const Triangle2& tri, const ReferenceTriangleRule& ref) {
    const Vec2 e1 = tri[1] - tri[0];
    const Vec2 e2 = tri[2] - tri[0];
    const double jac = std::abs(cross(e1, e2));
    for (std::size_t q = 0; q < ref.points.size(); ++q) {
        out.points.push_back(tri[0] + ref.points[q].x() * e1 + ref.points[q].y() * e2);
        out.weights.push_back(ref.weights[q] * jac);
    }
}

} // namespace

VolumeRule fluid_volume_rule(const Mesh& mesh, const CutGeometry& geo, Index element, int order) {
    VolumeRule rule;
    rule.element = element;
    const auto cls = geo.classes[static_cast<std::size_t>(element)];
    if (cls == ElementClass::Solid) return rule;
    const ReferenceTriangleRule ref = triangle_rule(order);
    if (cls == ElementClass::Fluid) {
        append_mapped(rule, mesh.vertices(element), ref);
        return rule;
    }
    for (const auto& tri : geo.cell(element)->fluid_triangles) append_mapped(rule, tri, ref);
    return rule;
}

SurfaceRule surface_rule(const InterfaceSegment& segment, const LevelSetBody& body, int order, NormalMode mode) {
    XFD_REQUIRE(order >= 0, InvalidArgument, "surface_rule: order must be >= 0");
    const LineRule g = gauss_legendre(std::max(1, (order + 2) / 2));
    SurfaceRule rule;
    rule.element = segment.element;
    const double len = segment.length();
    rule.chord_normal = segment.chord_normal();
    for (std::size_t q = 0; q < g.points.size(); ++q) {
        const Vec2 x = segment.p0 + g.points[q] * (segment.p1 - segment.p0);
        rule.points.push_back(x);
        rule.weights.push_back(g.weights[q] * len);
        rule.normals.push_back(mode == NormalMode::Analytic ? body.normal(x) : rule.chord_normal);
    }
    return rule;
}

QuadratureSet build_quadrature(const Mesh& mesh, const CutGeometry& geo, const LevelSetBody& body,
                               int volume_order, int surface_order, NormalMode mode) {
    QuadratureSet q;
    q.volume_order = volume_order;
    q.surface_order = surface_order;
    q.volume.reserve(static_cast<std::size_t>(mesh.num_triangles()));
    for (Index t = 0; t < mesh.num_triangles(); ++t) q.volume.push_back(fluid_volume_rule(mesh, geo, t, volume_order));
    q.surface.resize(geo.cells.size());
    for (std::size_t k = 0; k < geo.cells.size(); ++k)
        for (const auto& seg : geo.cells[k].segments) q.surface[k].push_back(surface_rule(seg, body, surface_order, mode));
    return q;
}

double fluid_area(const QuadratureSet& q) {
    double a = 0.0;
    for (const auto& r : q.volume) a += r.total_weight();
    return a;
}

double interface_length(const QuadratureSet& q) {
    double l = 0.0;
    for (const auto& c : q.surface)
        for (const auto& r : c) l += r.total_weight();
    return l;
}

} // namespace xfd
