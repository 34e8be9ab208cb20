#pragma once

#include <array>
#include <span>
#include <vector>

#include "polyspline/mesh.hpp"

namespace polyspline {

struct StarShapeInfo {
    std::vector<Vec2> kernel; // convex, counterclockwise; empty when no kernel
    Vec2 center = Vec2::Zero();
    bool empty = true;
};

/// Intersection of the inward half-planes of the polygon's edges. The chosen
/// center is the kernel's centroid.
StarShapeInfo polygon_kernel(std::span<const Vec2> polygon);
bool is_star_shaped(std::span<const Vec2> polygon);

/// Drops unreferenced vertices and rebuilds adjacency.
PolyMesh compact_mesh(const std::vector<Vec2>& vertices, const std::vector<std::vector<int>>& faces);

/// Replaces the given faces by the single polygon bounding their union. The
/// merged face becomes the last face of the result. Throws MergeFailed when
/// the union is not a disk.
PolyMesh merge_faces(const PolyMesh& mesh, std::span<const int> faces);

/// Ear-clipping triangulation of a simple counterclockwise polygon; returns
/// index triples into the polygon.
std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> polygon);

struct StarShapeReport {
    int polygons_fixed = 0;
    int max_iterations = 0;
    int triangulated = 0;
    std::vector<int> iterations; // per fixed polygon
};

/// Grows non-star-shaped polygons by merging the faces across edges that block
/// the view from the polygon's barycenter. Polygons stuck against a concave
/// boundary are triangulated and regrouped into star-shaped pieces.
PolyMesh make_star_shaped(const PolyMesh& mesh, StarShapeReport* report = nullptr);

/// Split counts per edge (>= 1) and polar rings per face (0 = keep). Splits
/// propagate across quads so that the output stays conforming: quads become
/// tensor grids, polygons without rings gain edge vertices, ringed faces get
/// concentric quad layers around a shrunken copy of themselves.
struct RemeshPlan {
    std::vector<int> edge_splits;
    std::vector<int> rings;
    std::vector<Vec2> centers;
};

RemeshPlan empty_plan(const PolyMesh& mesh);
PolyMesh remesh(const PolyMesh& mesh, RemeshPlan plan);

/// `target_edge_len <= 0` uses the mesh average edge length.
PolyMesh polar_refine(const PolyMesh& mesh, std::span<const int> polygons, int rings = 1, double target_edge_len = 0.0);
PolyMesh polar_refine(const PolyMesh& mesh, int polygon, int rings = 1, double target_edge_len = 0.0);

/// Faces that are not quads, plus `extra_polygons`.
std::vector<char> polygon_mask(const PolyMesh& mesh, std::span<const int> extra_polygons = {});
std::vector<int> separation_violations(const PolyMesh& mesh);
PolyMesh ensure_separation(const PolyMesh& mesh, int rings = 1, double target_edge_len = 0.0);

PolyMesh uniform_refine(const PolyMesh& mesh);

} // namespace polyspline
