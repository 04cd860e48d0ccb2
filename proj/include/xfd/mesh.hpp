#pragma once

#include "xfd/common.hpp"

#include <array>
#include <vector>

namespace xfd {

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p) const { return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1; }
};

enum class DiagonalSplit {
    Uniform,     // every cell split along (i,j)-(i+1,j+1)
    Alternating, // checkerboard of both diagonals
};

/// Structured triangulation of a rectangle.
///
/// Node (i, j), 0 <= i <= nx, 0 <= j <= ny, has index j*(nx+1) + i (x-fast,
/// row-major). Cell (i, j) produces triangles 2*(j*nx + i) and 2*(j*nx + i) + 1.
/// All triangles are counter-clockwise. Edges are numbered in order of first
/// appearance while walking triangles and their local edges (v0v1, v1v2, v2v0).
class Mesh {
public:
    using Triangle = std::array<Index, 3>;
    using Edge = std::array<Index, 2>;

    Mesh(const Rect& rect, Index nx, Index ny, DiagonalSplit split = DiagonalSplit::Uniform);

    const Rect& rect() const { return rect_; }
    Index nx() const { return nx_; }
    Index ny() const { return ny_; }

    Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
    Index num_triangles() const { return static_cast<Index>(triangles_.size()); }
    Index num_edges() const { return static_cast<Index>(edges_.size()); }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const Vec2& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const Triangle& triangle(Index t) const { return triangles_[static_cast<std::size_t>(t)]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }
    /// Edges of triangle t, local edge k joins local vertices k and (k+1)%3.
    const std::array<Index, 3>& triangle_edges(Index t) const { return triangle_edges_[static_cast<std::size_t>(t)]; }
    bool on_boundary(Index node) const { return boundary_[static_cast<std::size_t>(node)] != 0; }
    bool edge_on_boundary(Index e) const;

    /// Triangles sharing each node.
    const std::vector<std::vector<Index>>& node_triangles() const { return node_triangles_; }

    /// Maximum triangle diameter.
    double h() const { return h_; }

    std::array<Vec2, 3> vertices(Index t) const;
    double signed_area(Index t) const;
    double diameter(Index t) const;

private:
    Rect rect_;
    Index nx_, ny_;
    std::vector<Vec2> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<Index, 3>> triangle_edges_;
    std::vector<char> boundary_;
    std::vector<std::vector<Index>> node_triangles_;
    double h_ = 0.0;
};

Mesh build_structured_mesh(const Rect& rect, Index nx, Index ny, DiagonalSplit split = DiagonalSplit::Uniform);

} // namespace xfd
