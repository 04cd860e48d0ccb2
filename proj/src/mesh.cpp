#include "xfd/mesh.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace xfd {

Mesh::Mesh(const Rect& rect, Index nx, Index ny, DiagonalSplit split) : rect_(rect), nx_(nx), ny_(ny) {
    XFD_REQUIRE(nx >= 1 && ny >= 1, InvalidArgument, "mesh: nx and ny must be >= 1");
    XFD_REQUIRE(rect.x0 < rect.x1 && rect.y0 < rect.y1, InvalidArgument, "mesh: degenerate rectangle");

    const Index stride = nx + 1;
    nodes_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    boundary_.reserve(nodes_.capacity());
    for (Index j = 0; j <= ny; ++j) {
        const double y = (j == ny) ? rect.y1 : rect.y0 + rect.height() * static_cast<double>(j) / static_cast<double>(ny);
        for (Index i = 0; i <= nx; ++i) {
            const double x = (i == nx) ? rect.x1 : rect.x0 + rect.width() * static_cast<double>(i) / static_cast<double>(nx);
            nodes_.emplace_back(x, y);
            boundary_.push_back(i == 0 || j == 0 || i == nx || j == ny ? 1 : 0);
        }
    }

    triangles_.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const Index v00 = j * stride + i;
            const Index v10 = v00 + 1;
            const Index v01 = v00 + stride;
            const Index v11 = v01 + 1;
            const bool flip = split == DiagonalSplit::Alternating && ((i + j) % 2 == 1);
            if (!flip) {
                triangles_.push_back({v00, v10, v11});
                triangles_.push_back({v00, v11, v01});
            } else {
                triangles_.push_back({v00, v10, v01});
                triangles_.push_back({v10, v11, v01});
            }
        }
    }

    std::map<std::pair<Index, Index>, Index> edge_ids;
    triangle_edges_.resize(triangles_.size());
    node_triangles_.resize(nodes_.size());
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            const Index a = tri[static_cast<std::size_t>(k)];
            const Index b = tri[static_cast<std::size_t>((k + 1) % 3)];
            const auto key = std::minmax(a, b);
            auto [it, inserted] = edge_ids.emplace(key, static_cast<Index>(edges_.size()));
            if (inserted) edges_.push_back({key.first, key.second});
            triangle_edges_[t][static_cast<std::size_t>(k)] = it->second;
            node_triangles_[static_cast<std::size_t>(a)].push_back(static_cast<Index>(t));
        }
        h_ = std::max(h_, diameter(static_cast<Index>(t)));
    }
}

bool Mesh::edge_on_boundary(Index e) const {
    const auto& ed = edge(e);
    const Vec2& a = node(ed[0]);
    const Vec2& b = node(ed[1]);
    return (a.x() == rect_.x0 && b.x() == rect_.x0) || (a.x() == rect_.x1 && b.x() == rect_.x1) ||
           (a.y() == rect_.y0 && b.y() == rect_.y0) || (a.y() == rect_.y1 && b.y() == rect_.y1);
}

std::array<Vec2, 3> Mesh::vertices(Index t) const {
    const auto& tri = triangle(t);
    return {node(tri[0]), node(tri[1]), node(tri[2])};
}

double Mesh::signed_area(Index t) const {
    const auto v = vertices(t);
    return 0.5 * cross(v[1] - v[0], v[2] - v[0]);
}

double Mesh::diameter(Index t) const {
    const auto v = vertices(t);
    return std::max({(v[1] - v[0]).norm(), (v[2] - v[1]).norm(), (v[0] - v[2]).norm()});
}

Mesh build_structured_mesh(const Rect& rect, Index nx, Index ny, DiagonalSplit split) {
    return Mesh(rect, nx, ny, split);
}

} // namespace xfd
