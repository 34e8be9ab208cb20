#pragma once

#include <array>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/classify.hpp"
#include "polyspline/mesh.hpp"

namespace polyspline {

enum class DofKind : unsigned char {
    SplineCell,   // B-spline centered on a cell
    SplineEdge,   // extra spline dof behind a boundary edge
    SplineVertex, // extra spline dof behind a boundary corner vertex
    LagrangeVertex,
    LagrangeEdge,
    LagrangeCell,
};

struct DofRecord {
    DofKind kind;
    int entity;  // cell, edge or vertex id depending on kind
    Vec2 anchor; // centroid of the entity
    bool boundary = false;
};

class DofTable {
public:
    int find_or_add(DofKind kind, int entity, const Vec2& anchor);
    int find(DofKind kind, int entity) const;
    int size() const { return int(records_.size()); }
    const DofRecord& operator[](int i) const { return records_[i]; }
    DofRecord& operator[](int i) { return records_[i]; }
    const std::vector<DofRecord>& records() const { return records_; }

private:
    std::vector<DofRecord> records_;
    std::unordered_map<long long, int> index_;
};

enum class ElementKind : unsigned char { Spline, Lagrange1, Lagrange2, Polygon };

using Knots4 = std::array<double, 4>;

/// Knots of the three quadratic B-splines active on the span [0, 1]; a
/// truncated side uses the open (repeated) knot.
std::array<Knots4, 3> spline_knots_1d(bool truncated_lo, bool truncated_hi);

/// Local shape functions of one quad cell and the map to global dofs:
/// local coefficient r equals sum_c l2g(r, c) * u[dofs[c]], so global
/// function dofs[c] restricted to the cell is sum_r l2g(r, c) N_r.
struct ElementBasis {
    int cell = -1;
    ElementKind kind = ElementKind::Polygon;
    std::array<Knots4, 3> knots_u{};
    std::array<Knots4, 3> knots_v{};
    std::vector<int> dofs;
    Eigen::MatrixXd l2g;

    int local_size() const;
    /// Local shape functions at (u, v); gradients are parametric, stored as columns.
    void eval_local(double u, double v, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const;
    /// Restrictions of the global functions `dofs` at (u, v).
    void eval_global(double u, double v, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const;
};

/// Parametric position of local corner k of a quad.
Vec2 quad_corner(int k);
/// Parametric point at parameter s along side d of a quad, running with the
/// side's halfedge.
Vec2 quad_side_point(int d, double s);

struct BasisSet {
    DofTable table;
    std::vector<ElementBasis> elements; // one per cell; polygons keep kind Polygon
    int lagrange_order = 2;

    int num_dofs() const { return table.size(); }
};

/// Builds spline elements on SplineCompatible cells and Lagrange elements of
/// the given order on Q2Quad cells. Lagrange nodes lying on the closure of a
/// spline cell are tied to the spline dofs by evaluating the spline there.
BasisSet build_bases(const PolyMesh& mesh, const CellClass& classes, int lagrange_order = 2);

/// Spline element for one cell, registering its nine dofs in `table`.
ElementBasis spline_element_basis(const PolyMesh& mesh, const CellClass& classes, int cell, DofTable& table);

} // namespace polyspline
