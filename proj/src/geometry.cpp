#include "xfd/geometry.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace xfd {

namespace {

// Quadratic in the body frame whose sign matches phi for both shapes:
// |A (x - c)|^2 - 1 with A = diag(1/a, 1/b) R^T.
Mat2 normalizing_map(const LevelSetBody& body) {
    const auto [a, b] = body.semi_axes();
    Mat2 scale = Mat2::Zero();
    scale(0, 0) = 1.0 / a;
    scale(1, 1) = 1.0 / b;
    return scale * body.pose().rotation().transpose();
}

// Minimum over s in [0,1] of |w0 + s w1|^2 - 1.
double min_on_segment(const Vec2& w0, const Vec2& w1) {
    const double ww = w1.squaredNorm();
    double s = ww > 0.0 ? -w0.dot(w1) / ww : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return (w0 + s * w1).squaredNorm() - 1.0;
}

bool point_in_triangle(const Vec2& p, const std::array<Vec2, 3>& v) {
    const double d0 = cross(v[1] - v[0], p - v[0]);
    const double d1 = cross(v[2] - v[1], p - v[1]);
    const double d2 = cross(v[0] - v[2], p - v[2]);
    return d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0;
}

// Root of phi on [a, b] with phi(a) > 0 >= phi(b). Bisection narrows the
// bracket, Newton finishes; Newton steps leaving the bracket fall back to
// bisection.
Vec2 find_root(const LevelSetBody& body, const Vec2& a, const Vec2& b, double tol) {
    const Vec2 d = b - a;
    double lo = 0.0, hi = 1.0;
    double flo = body.value(a);
    const double fhi = body.value(b);
    if (std::abs(flo) <= tol) return a;
    if (std::abs(fhi) <= tol) return b;
    if (!(flo > 0.0 && fhi < 0.0))
        throw RootFindingFailure("interface root not bracketed on a sign-changing edge");

    double s = 0.5;
    for (int it = 0; it < 200; ++it) {
        const Vec2 x = a + s * d;
        const double f = body.value(x);
        if (std::abs(f) <= tol) return x;
        if (f > 0.0) {
            lo = s;
            flo = f;
        } else {
            hi = s;
        }
        const double df = body.gradient(x).dot(d);
        double next = (df != 0.0) ? s - f / df : 0.5 * (lo + hi);
        if (!(next > lo && next < hi) || (hi - lo) > 0.25) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-16) return a + s * d;
        s = next;
    }
    throw RootFindingFailure("interface root finding did not converge");
}

} // namespace

Mat2 RigidPose::rotation() const {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

RigidPose RigidPose::transformed(double rot, const Vec2& shift) const {
    const double c = std::cos(rot);
    const double s = std::sin(rot);
    Mat2 r;
    r << c, -s, s, c;
    return {r * center + shift, angle + rot};
}

LevelSetBody::LevelSetBody(Shape shape, RigidPose pose) : shape_(shape), pose_(pose) {
    if (const auto* c = std::get_if<Circle>(&shape_)) {
        XFD_REQUIRE(c->radius > 0.0, InvalidArgument, "circle radius must be positive");
    } else {
        const auto& e = std::get<Ellipse>(shape_);
        XFD_REQUIRE(e.semi_minor > 0.0 && e.semi_major >= e.semi_minor, InvalidArgument,
                    "ellipse requires semi_major >= semi_minor > 0");
    }
}

double LevelSetBody::value(const Vec2& x) const {
    if (const auto* c = std::get_if<Circle>(&shape_)) return (x - pose_.center).norm() - c->radius;
    const auto& e = std::get<Ellipse>(shape_);
    const Vec2 y = pose_.to_local(x);
    const double u = y.x() / e.semi_major;
    const double v = y.y() / e.semi_minor;
    return u * u + v * v - 1.0;
}

Vec2 LevelSetBody::gradient(const Vec2& x) const {
    if (std::holds_alternative<Circle>(shape_)) {
        const Vec2 r = x - pose_.center;
        const double n = r.norm();
        return n > 0.0 ? Vec2(r / n) : Vec2(1.0, 0.0);
    }
    const auto& e = std::get<Ellipse>(shape_);
    const Vec2 y = pose_.to_local(x);
    const Vec2 g_local(2.0 * y.x() / (e.semi_major * e.semi_major), 2.0 * y.y() / (e.semi_minor * e.semi_minor));
    return pose_.rotation() * g_local;
}

Vec2 LevelSetBody::normal(const Vec2& x) const {
    const Vec2 g = gradient(x);
    const double n = g.norm();
    return n > 0.0 ? Vec2(-g / n) : Vec2(-1.0, 0.0);
}

std::array<double, 2> LevelSetBody::semi_axes() const {
    if (const auto* c = std::get_if<Circle>(&shape_)) return {c->radius, c->radius};
    const auto& e = std::get<Ellipse>(shape_);
    return {e.semi_major, e.semi_minor};
}

double LevelSetBody::area() const {
    const auto [a, b] = semi_axes();
    return std::numbers::pi * a * b;
}

Rect LevelSetBody::bounding_box() const {
    const auto [a, b] = semi_axes();
    const double c = std::cos(pose_.angle);
    const double s = std::sin(pose_.angle);
    const double ex = std::sqrt(a * a * c * c + b * b * s * s);
    const double ey = std::sqrt(a * a * s * s + b * b * c * c);
    return {pose_.center.x() - ex, pose_.center.y() - ey, pose_.center.x() + ex, pose_.center.y() + ey};
}

std::vector<ElementClass> classify_elements(const Mesh& mesh, const LevelSetBody& body,
                                            const GeometryTolerances& tol) {
    const double eps = tol.cut * mesh.h();
    const Mat2 map = normalizing_map(body);
    const Vec2 center = body.pose().center;
    std::vector<ElementClass> classes(static_cast<std::size_t>(mesh.num_triangles()), ElementClass::Fluid);

    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        const auto v = mesh.vertices(t);
        const std::array<Vec2, 6> samples{v[0], v[1], v[2], 0.5 * (v[0] + v[1]), 0.5 * (v[1] + v[2]),
                                          0.5 * (v[2] + v[0])};
        bool pos = false, neg = false, near = false;
        for (const auto& p : samples) {
            const double f = body.value(p);
            if (std::abs(f) <= eps) near = true;
            if (f > 0.0) pos = true;
            if (f < 0.0) neg = true;
        }
        ElementClass cls;
        if (near || (pos && neg)) {
            cls = ElementClass::Cut;
        } else if (neg) {
            cls = ElementClass::Solid;
        } else {
            cls = ElementClass::Fluid;
            for (int k = 0; k < 3 && cls == ElementClass::Fluid; ++k) {
                const Vec2& a = v[static_cast<std::size_t>(k)];
                const Vec2& b = v[static_cast<std::size_t>((k + 1) % 3)];
                if (min_on_segment(map * (a - center), map * (b - a)) < 0.0) cls = ElementClass::Cut;
            }
            if (cls == ElementClass::Fluid && point_in_triangle(center, v)) cls = ElementClass::Cut;
        }
        classes[static_cast<std::size_t>(t)] = cls;
    }
    return classes;
}

Vec2 InterfaceSegment::chord_normal() const {
    const Vec2 d = p1 - p0;
    const double len = d.norm();
    if (len == 0.0) return normal;
    Vec2 n = perp(d) / len;
    return n.dot(normal) < 0.0 ? Vec2(-n) : n;
}

double CutCell::fluid_area() const {
    double a = 0.0;
    for (const auto& tri : fluid_triangles) a += 0.5 * cross(tri[1] - tri[0], tri[2] - tri[0]);
    return a;
}

double CutCell::interface_length() const {
    double l = 0.0;
    for (const auto& s : segments) l += s.length();
    return l;
}

CutCell cut_element(const Mesh& mesh, Index t, const LevelSetBody& body, int refinement,
                    const GeometryTolerances& tol) {
    XFD_REQUIRE(refinement >= 1, InvalidArgument, "nseg_per_cut must be >= 1");
    const auto v = mesh.vertices(t);
    const int s = refinement;
    const auto grid_id = [s](int i, int j) { return j * (s + 1) + i; };

    std::vector<Vec2> pts(static_cast<std::size_t>((s + 1) * (s + 1)));
    std::vector<double> phi(pts.size(), 0.0);
    for (int j = 0; j <= s; ++j) {
        for (int i = 0; i + j <= s; ++i) {
            const double xi = static_cast<double>(i) / s;
            const double eta = static_cast<double>(j) / s;
            const auto k = static_cast<std::size_t>(grid_id(i, j));
            pts[k] = v[0] + xi * (v[1] - v[0]) + eta * (v[2] - v[0]);
            phi[k] = body.value(pts[k]);
        }
    }

    CutCell cell;
    cell.element = t;

    auto clip = [&](std::array<int, 3> ids) {
        std::array<bool, 3> inside{};
        int n_in = 0;
        for (int k = 0; k < 3; ++k) {
            inside[static_cast<std::size_t>(k)] = phi[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])] > 0.0;
            n_in += inside[static_cast<std::size_t>(k)] ? 1 : 0;
        }
        const auto P = [&](int k) { return pts[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])]; };
        if (n_in == 3) {
            cell.fluid_triangles.push_back({P(0), P(1), P(2)});
            return;
        }
        if (n_in == 0) return;

        // Polygon of the fluid part, counter-clockwise, and the two crossings.
        std::vector<Vec2> poly;
        std::array<Vec2, 2> cross_pts;
        int nc = 0;
        for (int k = 0; k < 3; ++k) {
            const int k1 = (k + 1) % 3;
            if (inside[static_cast<std::size_t>(k)]) poly.push_back(P(k));
            if (inside[static_cast<std::size_t>(k)] != inside[static_cast<std::size_t>(k1)]) {
                // Always searched from the fluid end, so a sub-edge shared by two
                // sub-triangles yields the same point in both.
                const int ga = ids[static_cast<std::size_t>(k)];
                const int gb = ids[static_cast<std::size_t>(k1)];
                const int gin = inside[static_cast<std::size_t>(k)] ? ga : gb;
                const int gout = inside[static_cast<std::size_t>(k)] ? gb : ga;
                Vec2 r = find_root(body, pts[static_cast<std::size_t>(gin)], pts[static_cast<std::size_t>(gout)], tol.root);
                poly.push_back(r);
                cross_pts[static_cast<std::size_t>(nc++)] = r;
            }
        }
        for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
            const Triangle2 tri{poly[0], poly[k], poly[k + 1]};
            if (cross(tri[1] - tri[0], tri[2] - tri[0]) > 0.0) cell.fluid_triangles.push_back(tri);
        }
        InterfaceSegment seg;
        seg.element = t;
        seg.p0 = cross_pts[0];
        seg.p1 = cross_pts[1];
        if (seg.length() > 1e-14 * mesh.h()) {
            seg.normal = body.normal(seg.midpoint());
            cell.segments.push_back(seg);
        }
    };

    for (int j = 0; j < s; ++j) {
        for (int i = 0; i + j < s; ++i) {
            clip({grid_id(i, j), grid_id(i + 1, j), grid_id(i, j + 1)});
            if (i + j + 1 < s) clip({grid_id(i + 1, j), grid_id(i + 1, j + 1), grid_id(i, j + 1)});
        }
    }
    return cell;
}

CutGeometry build_cut_geometry(const Mesh& mesh, const LevelSetBody& body, int refinement,
                               const GeometryTolerances& tol) {
    CutGeometry geo;
    geo.classes = classify_elements(mesh, body, tol);
    geo.cut_index.assign(geo.classes.size(), -1);
    for (Index t = 0; t < mesh.num_triangles(); ++t) {
        auto& cls = geo.classes[static_cast<std::size_t>(t)];
        if (cls != ElementClass::Cut) continue;
        CutCell cell = cut_element(mesh, t, body, refinement, tol);
        const double area = std::abs(mesh.signed_area(t));
        if (cell.segments.empty()) {
            cls = cell.fluid_area() > 0.5 * area ? ElementClass::Fluid : ElementClass::Solid;
            ++geo.demoted;
            continue;
        }
        if (cell.fluid_area() < 1e-14 * area) {
            cell.fluid_triangles.clear();
            ++geo.degenerate;
            spdlog::debug("degenerate cut in element {}: empty fluid part", t);
        }
        geo.cut_index[static_cast<std::size_t>(t)] = static_cast<Index>(geo.cells.size());
        geo.cells.push_back(std::move(cell));
    }
    return geo;
}

std::vector<InterfaceSegment> extract_interface(const Mesh& mesh, const LevelSetBody& body, int nseg_per_cut,
                                                const GeometryTolerances& tol) {
    const CutGeometry geo = build_cut_geometry(mesh, body, nseg_per_cut, tol);
    std::vector<InterfaceSegment> out;
    for (const auto& c : geo.cells) out.insert(out.end(), c.segments.begin(), c.segments.end());
    return out;
}

} // namespace xfd
