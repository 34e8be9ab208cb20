#pragma once

#include <cstdint>
#include <vector>

#include "polyspline/mesh.hpp"

namespace polyspline {

/// nx-by-ny grid of quads on the box [lo, hi]; cell (i, j) has index j*nx + i.
PolyMesh regular_grid(int nx, int ny, Vec2 lo = Vec2(0, 0), Vec2 hi = Vec2(1, 1));

/// n-by-n unit-square grid whose five central cells (a plus sign) are merged
/// into one star-shaped 12-gon, followed by separation. Requires n >= 5.
PolyMesh hybrid_cross_mesh(int n = 5);

/// Grid with every cell an affine copy of one parallelogram: x -> x + shear*y.
PolyMesh parallelogram_grid(int n, double shear);

struct PerturbedMesh {
    PolyMesh mesh;
    std::vector<int> marked; // quads to be treated as polygons
};

/// Marks `fraction` of the quads (interior, pairwise vertex-disjoint) and moves
/// one vertex of each along its diagonal by a factor drawn from [lo, hi].
PerturbedMesh perturb_and_mark(const PolyMesh& mesh, double fraction, double lo, double hi, std::uint64_t seed);

/// Random grid meshes with merged cell clusters, some of them not star-shaped
/// and some touching the boundary or each other.
std::vector<PolyMesh> preprocess_corpus(int count, std::uint64_t seed);

} // namespace polyspline
