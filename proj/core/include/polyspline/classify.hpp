#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "polyspline/mesh.hpp"

namespace polyspline {

enum class CellTag : unsigned char { SplineCompatible, Q2Quad, Polygon };

struct CellClass {
    std::vector<CellTag> tags;

    CellTag operator[](int f) const { return tags[f]; }
    int count(CellTag t) const;
    std::vector<int> cells(CellTag t) const;
};

/// One-ring of a spline-compatible quad in its local frame. Side d is the
/// halfedge `mesh.halfedge(cell, d)`; in the unit-square frame side 0 is
/// y = 0, side 1 is x = 1, side 2 is y = 1 and side 3 is x = 0. Corner c is
/// local vertex c, sitting between sides c-1 and c.
struct SplineStencil {
    int cell = -1;
    std::array<int, 4> side_face{-1, -1, -1, -1};
    std::array<int, 4> corner_face{-1, -1, -1, -1};
};

/// Returns the stencil when the quad's one-ring is a (possibly truncated)
/// regular 3x3 grid of quads, nothing otherwise.
std::optional<SplineStencil> spline_stencil(const PolyMesh& mesh, int f);
bool is_spline_compatible(const PolyMesh& mesh, int f);

/// `extra_polygons` lists quads to be treated as polygons.
CellClass classify_cells(const PolyMesh& mesh, std::span<const int> extra_polygons = {});

/// Throws SeparationViolated if two polygon cells share a vertex or a polygon
/// touches the boundary.
void check_separation(const PolyMesh& mesh, const std::vector<char>& is_polygon);
bool polygons_separated(const PolyMesh& mesh, const std::vector<char>& is_polygon);

} // namespace polyspline
