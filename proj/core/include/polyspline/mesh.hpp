#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "polyspline/types.hpp"

namespace polyspline {

/// Polygonal mesh with implicit halfedges. Halfedge `offset(f) + k` runs from
/// the k-th to the (k+1)-th vertex of face f. The mesh is immutable once built;
/// construction validates orientation and manifoldness.
class PolyMesh {
public:
    PolyMesh() = default;
    PolyMesh(std::vector<Vec2> vertices, const std::vector<std::vector<int>>& faces);

    int num_vertices() const { return int(vertices_.size()); }
    int num_faces() const { return int(face_offset_.size()) - 1; }
    int num_halfedges() const { return int(face_verts_.size()); }
    int num_edges() const { return int(edge_halfedge_.size()); }
    int num_boundary_edges() const { return num_boundary_edges_; }
    int num_interior_edges() const { return num_edges() - num_boundary_edges_; }

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const Vec2& vertex(int v) const { return vertices_[v]; }

    std::span<const int> face(int f) const
    {
        return {face_verts_.data() + face_offset_[f], std::size_t(arity(f))};
    }
    int arity(int f) const { return face_offset_[f + 1] - face_offset_[f]; }
    bool is_quad(int f) const { return arity(f) == 4; }
    std::vector<Vec2> face_points(int f) const;
    std::vector<std::vector<int>> face_list() const;
    double face_area(int f) const;

    int halfedge(int f, int k) const
    {
        const int n = arity(f);
        return face_offset_[f] + ((k % n) + n) % n;
    }
    int face_of(int h) const { return he_face_[h]; }
    int local_index(int h) const { return h - face_offset_[he_face_[h]]; }
    int next(int h) const { return halfedge(he_face_[h], local_index(h) + 1); }
    int prev(int h) const { return halfedge(he_face_[h], local_index(h) - 1); }
    int twin(int h) const { return he_twin_[h]; }
    int from(int h) const { return face_verts_[h]; }
    int to(int h) const { return face_verts_[next(h)]; }
    int edge_of(int h) const { return he_edge_[h]; }
    bool is_boundary_halfedge(int h) const { return he_twin_[h] < 0; }
    /// Halfedge a->b, or -1.
    int find_halfedge(int a, int b) const;

    int edge_halfedge(int e) const { return edge_halfedge_[e]; }
    int edge_v0(int e) const { return from(edge_halfedge_[e]); }
    int edge_v1(int e) const { return to(edge_halfedge_[e]); }
    bool is_boundary_edge(int e) const { return is_boundary_halfedge(edge_halfedge_[e]); }
    double edge_length(int e) const { return (vertex(edge_v1(e)) - vertex(edge_v0(e))).norm(); }
    Vec2 edge_midpoint(int e) const { return 0.5 * (vertex(edge_v0(e)) + vertex(edge_v1(e))); }

    bool is_boundary_vertex(int v) const { return vertex_boundary_[v] != 0; }
    std::span<const int> vertex_faces(int v) const
    {
        return {vf_faces_.data() + vf_offset_[v], std::size_t(vf_offset_[v + 1] - vf_offset_[v])};
    }
    int valence(int v) const { return vf_offset_[v + 1] - vf_offset_[v]; }

    /// Faces sharing an edge or a vertex with f (excluding f).
    std::vector<int> vertex_neighbors(int f) const;
    bool touches_boundary(int f) const;

    double average_edge_length() const;
    double max_edge_length() const;
    double total_area() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<int> face_offset_{0};
    std::vector<int> face_verts_;
    std::vector<int> he_face_;
    std::vector<int> he_twin_;
    std::vector<int> he_edge_;
    std::vector<int> edge_halfedge_;
    std::vector<char> vertex_boundary_;
    std::vector<int> vf_offset_;
    std::vector<int> vf_faces_;
    std::unordered_map<long long, int> he_lookup_;
    int num_boundary_edges_ = 0;
};

/// Validating constructor wrapper.
PolyMesh build_adjacency(std::vector<Vec2> vertices, const std::vector<std::vector<int>>& faces);

} // namespace polyspline
