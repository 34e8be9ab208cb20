#include "polyspline/classify.hpp"

#include <algorithm>
#include <string>

#include "polyspline/error.hpp"

namespace polyspline {

int CellClass::count(CellTag t) const { return int(std::count(tags.begin(), tags.end(), t)); }

std::vector<int> CellClass::cells(CellTag t) const
{
    std::vector<int> out;
    for (int f = 0; f < int(tags.size()); ++f)
        if (tags[f] == t)
            out.push_back(f);
    return out;
}

std::optional<SplineStencil> spline_stencil(const PolyMesh& m, int f)
{
    if (!m.is_quad(f))
        return std::nullopt;
    SplineStencil st;
    st.cell = f;
    std::array<int, 4> h{};
    for (int d = 0; d < 4; ++d) {
        h[d] = m.halfedge(f, d);
        const int t = m.twin(h[d]);
        st.side_face[d] = t < 0 ? -1 : m.face_of(t);
    }
    for (int c = 0; c < 4; ++c) {
        const int v = m.face(f)[c];
        for (int g : m.vertex_faces(v))
            if (!m.is_quad(g))
                return std::nullopt;
        const int dl = (c + 3) % 4;
        const bool has_l = st.side_face[dl] >= 0;
        const bool has_r = st.side_face[c] >= 0;
        if (has_l && has_r) {
            if (m.is_boundary_vertex(v) || m.valence(v) != 4)
                return std::nullopt;
            const int a = m.twin(m.prev(m.twin(h[dl])));
            const int b = m.twin(m.next(m.twin(h[c])));
            if (a < 0 || b < 0 || m.face_of(a) != m.face_of(b))
                return std::nullopt;
            st.corner_face[c] = m.face_of(a);
        } else if (has_l) {
            if (!m.is_boundary_vertex(v) || m.valence(v) != 2 || m.twin(m.prev(m.twin(h[dl]))) >= 0)
                return std::nullopt;
        } else if (has_r) {
            if (!m.is_boundary_vertex(v) || m.valence(v) != 2 || m.twin(m.next(m.twin(h[c]))) >= 0)
                return std::nullopt;
        } else if (!m.is_boundary_vertex(v) || m.valence(v) != 1) {
            return std::nullopt;
        }
    }
    std::vector<int> all{f};
    for (int d = 0; d < 4; ++d) {
        if (st.side_face[d] >= 0)
            all.push_back(st.side_face[d]);
        if (st.corner_face[d] >= 0)
            all.push_back(st.corner_face[d]);
    }
    std::sort(all.begin(), all.end());
    if (std::adjacent_find(all.begin(), all.end()) != all.end())
        return std::nullopt;
    return st;
}

bool is_spline_compatible(const PolyMesh& mesh, int f) { return spline_stencil(mesh, f).has_value(); }

bool polygons_separated(const PolyMesh& mesh, const std::vector<char>& is_polygon)
{
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!is_polygon[f])
            continue;
        if (mesh.touches_boundary(f))
            return false;
        for (int g : mesh.vertex_neighbors(f))
            if (is_polygon[g])
                return false;
    }
    return true;
}

void check_separation(const PolyMesh& mesh, const std::vector<char>& is_polygon)
{
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!is_polygon[f])
            continue;
        if (mesh.touches_boundary(f))
            throw Error(ErrorCode::SeparationViolated, "polygon " + std::to_string(f) + " touches the boundary");
        for (int g : mesh.vertex_neighbors(f))
            if (is_polygon[g])
                throw Error(ErrorCode::SeparationViolated,
                            "polygons " + std::to_string(f) + " and " + std::to_string(g) + " are adjacent");
    }
}

CellClass classify_cells(const PolyMesh& mesh, std::span<const int> extra_polygons)
{
    const int nf = mesh.num_faces();
    std::vector<char> poly(nf, 0);
    for (int f = 0; f < nf; ++f)
        poly[f] = mesh.is_quad(f) ? 0 : 1;
    for (int f : extra_polygons)
        poly.at(f) = 1;
    check_separation(mesh, poly);

    CellClass cc;
    cc.tags.assign(nf, CellTag::Q2Quad);
    for (int f = 0; f < nf; ++f)
        if (poly[f])
            cc.tags[f] = CellTag::Polygon;
    for (int f = 0; f < nf; ++f) {
        if (poly[f])
            continue;
        const auto nb = mesh.vertex_neighbors(f);
        const bool near_poly = std::any_of(nb.begin(), nb.end(), [&](int g) { return poly[g] != 0; });
        if (!near_poly && is_spline_compatible(mesh, f))
            cc.tags[f] = CellTag::SplineCompatible;
    }
    return cc;
}

} // namespace polyspline
