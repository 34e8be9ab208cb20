#pragma once

#include <iosfwd>
#include <string>

#include "polyspline/mesh.hpp"

namespace polyspline {

/// Text "poly-off" format: `NV NF`, then NV lines `x y`, then NF lines
/// `k i1 ... ik` with 0-based counterclockwise indices. Lines starting with
/// `#` are comments.
PolyMesh read_polyoff(std::istream& in);
PolyMesh read_polyoff(const std::string& path);
void write_polyoff(std::ostream& out, const PolyMesh& mesh);
void write_polyoff(const std::string& path, const PolyMesh& mesh);

} // namespace polyspline
