#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/bases.hpp"
#include "polyspline/classify.hpp"
#include "polyspline/mesh.hpp"
#include "polyspline/quadrature.hpp"

namespace polyspline {

enum class MapKind : unsigned char { Identity, Lagrange, Spline };

struct GeoMapEval {
    Vec2 x;
    Mat2 jac;      // columns: dg/du, dg/dv
    double det;    // signed det Dg
    Mat2 metric;   // Dg^-1 Dg^-T

    double abs_det() const { return std::abs(det); }

    /// Physical gradients from parametric ones (columns).
    Eigen::Matrix2Xd push_gradients(const Eigen::Matrix2Xd& grads) const;
};

/// Per-cell map from the unit square (or the identity on polygons) to the
/// physical domain. Spline cells combine control points with the cell's spline
/// functions; other quads interpolate nine Lagrange nodes, which is bilinear
/// unless a node is shared with the spline region (then it follows the spline
/// map there and keeps the mesh watertight).
class GeoMap {
public:
    GeoMap() = default;

    MapKind kind(int cell) const { return kinds_[cell]; }
    Vec2 map(int cell, const Vec2& xhat) const;
    Mat2 jacobian(int cell, const Vec2& xhat) const;
    /// Throws DegenerateJacobian when |det Dg| < 1e-14.
    GeoMapEval eval(int cell, const Vec2& xhat) const;

    const std::vector<Vec2>& control_points() const { return control_; }
    int num_cells() const { return int(kinds_.size()); }

    /// Bilinear map for each quad and the identity for other faces.
    static GeoMap bilinear(const PolyMesh& mesh);

private:
    friend GeoMap fit_geometric_map(const PolyMesh&, const CellClass&, const BasisSet&);

    std::vector<MapKind> kinds_;
    std::vector<Eigen::Matrix<double, 2, 9>> nodes_; // Lagrange cells
    std::vector<Vec2> control_;                      // indexed by global dof
    std::vector<ElementBasis> spline_;               // spline cells only
};

/// Least-norm correction of Greville control points so that every vertex of
/// the spline region is interpolated. Throws SingularFit when interpolation
/// residuals remain.
GeoMap fit_geometric_map(const PolyMesh& mesh, const CellClass& classes, const BasisSet& bases);

struct GeoMapReport {
    double min_det = 0.0;
    std::vector<int> flagged; // cells with det <= 0 somewhere
};

GeoMapReport validate_geomap(const PolyMesh& mesh, const GeoMap& geomap, const QuadratureRule& rule);

} // namespace polyspline
