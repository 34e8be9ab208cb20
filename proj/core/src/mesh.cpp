#include "polyspline/mesh.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "polyspline/error.hpp"
#include "polyspline/geometry.hpp"

namespace polyspline {

namespace {

long long pack(int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned int>(b); }

} // namespace

PolyMesh::PolyMesh(std::vector<Vec2> vertices, const std::vector<std::vector<int>>& faces)
    : vertices_(std::move(vertices))
{
    const int nv = int(vertices_.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& loop = faces[f];
        if (loop.size() < 3)
            throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " has fewer than 3 vertices");
        for (int v : loop)
            if (v < 0 || v >= nv)
                throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " references vertex " + std::to_string(v));
        std::vector<int> sorted(loop);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw Error(ErrorCode::InvalidMesh, "face " + std::to_string(f) + " repeats a vertex");
        face_verts_.insert(face_verts_.end(), loop.begin(), loop.end());
        face_offset_.push_back(int(face_verts_.size()));
    }

    const int nh = num_halfedges();
    he_face_.resize(nh);
    for (int f = 0; f < num_faces(); ++f)
        for (int h = face_offset_[f]; h < face_offset_[f + 1]; ++h)
            he_face_[h] = f;

    std::map<std::pair<int, int>, int> undirected;
    for (int h = 0; h < nh; ++h) {
        const int a = from(h), b = to(h);
        if (++undirected[{std::min(a, b), std::max(a, b)}] > 2)
            throw Error(ErrorCode::NonManifoldEdge, "edge (" + std::to_string(a) + "," + std::to_string(b) + ") has more than two faces");
    }

    he_lookup_.reserve(nh);
    for (int h = 0; h < nh; ++h) {
        if (!he_lookup_.emplace(pack(from(h), to(h)), h).second)
            throw Error(ErrorCode::InconsistentOrientation, "edge (" + std::to_string(from(h)) + "," + std::to_string(to(h)) +
                                                                ") traversed twice in the same direction");
    }

    for (int f = 0; f < num_faces(); ++f) {
        const auto pts = face_points(f);
        if (geometry::signed_area(pts) <= 0.0)
            throw Error(ErrorCode::InconsistentOrientation, "face " + std::to_string(f) + " is not counterclockwise");
    }

    he_twin_.assign(nh, -1);
    he_edge_.assign(nh, -1);
    vertex_boundary_.assign(nv, 0);
    for (int h = 0; h < nh; ++h) {
        auto it = he_lookup_.find(pack(to(h), from(h)));
        if (it != he_lookup_.end())
            he_twin_[h] = it->second;
        if (he_edge_[h] >= 0)
            continue;
        const int e = int(edge_halfedge_.size());
        edge_halfedge_.push_back(h);
        he_edge_[h] = e;
        if (he_twin_[h] >= 0) {
            he_edge_[he_twin_[h]] = e;
        } else {
            ++num_boundary_edges_;
            vertex_boundary_[from(h)] = 1;
            vertex_boundary_[to(h)] = 1;
        }
    }
    vf_offset_.assign(nv + 1, 0);
    for (int v : face_verts_)
        ++vf_offset_[v + 1];
    for (int v = 0; v < nv; ++v)
        vf_offset_[v + 1] += vf_offset_[v];
    vf_faces_.resize(face_verts_.size());
    std::vector<int> fill(vf_offset_.begin(), vf_offset_.end() - 1);
    for (int h = 0; h < nh; ++h)
        vf_faces_[fill[from(h)]++] = he_face_[h];
}

int PolyMesh::find_halfedge(int a, int b) const
{
    auto it = he_lookup_.find(pack(a, b));
    return it == he_lookup_.end() ? -1 : it->second;
}

std::vector<Vec2> PolyMesh::face_points(int f) const
{
    std::vector<Vec2> pts;
    pts.reserve(arity(f));
    for (int v : face(f))
        pts.push_back(vertices_[v]);
    return pts;
}

std::vector<std::vector<int>> PolyMesh::face_list() const
{
    std::vector<std::vector<int>> out(num_faces());
    for (int f = 0; f < num_faces(); ++f)
        out[f].assign(face(f).begin(), face(f).end());
    return out;
}

double PolyMesh::face_area(int f) const { return geometry::signed_area(face_points(f)); }

std::vector<int> PolyMesh::vertex_neighbors(int f) const
{
    std::vector<int> out;
    for (int v : face(f))
        for (int g : vertex_faces(v))
            if (g != f)
                out.push_back(g);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool PolyMesh::touches_boundary(int f) const
{
    return std::any_of(face(f).begin(), face(f).end(), [&](int v) { return is_boundary_vertex(v); });
}

double PolyMesh::average_edge_length() const
{
    if (num_edges() == 0)
        return 0.0;
    double s = 0.0;
    for (int e = 0; e < num_edges(); ++e)
        s += edge_length(e);
    return s / num_edges();
}

double PolyMesh::max_edge_length() const
{
    double s = 0.0;
    for (int e = 0; e < num_edges(); ++e)
        s = std::max(s, edge_length(e));
    return s;
}

double PolyMesh::total_area() const
{
    double a = 0.0;
    for (int f = 0; f < num_faces(); ++f)
        a += face_area(f);
    return a;
}

PolyMesh build_adjacency(std::vector<Vec2> vertices, const std::vector<std::vector<int>>& faces)
{
    return PolyMesh(std::move(vertices), faces);
}

} // namespace polyspline
