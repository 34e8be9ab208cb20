#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/bases.hpp"
#include "polyspline/classify.hpp"
#include "polyspline/geomap.hpp"
#include "polyspline/mesh.hpp"
#include "polyspline/pde.hpp"
#include "polyspline/poly_basis.hpp"
#include "polyspline/quadrature.hpp"

namespace polyspline {

enum class BasisMode { Q1, Q2, PolySpline };

struct DiscretizationOptions {
    BasisMode mode = BasisMode::PolySpline;
    Pde pde;
    PolyBasisOptions poly;
    int quad_degree = 6;
    std::vector<int> extra_polygons; // quads handled as polygons
};

/// Global scalar basis functions evaluated on one cell at physical points.
/// Rows are points, columns are `dofs`; weights include |det Dg|.
struct ElementValues {
    int cell = -1;
    std::vector<int> dofs;
    std::vector<Vec2> points;
    std::vector<double> weights;
    Eigen::MatrixXd values, dx, dy;
};

/// Scalar basis on a hybrid mesh: splines on regular quads, Lagrange elements
/// on the other quads and fitted harmonic bases on polygons, plus the
/// geometric map. Vector problems use one copy per component, with global
/// dof 2*j + c.
class Discretization {
public:
    Discretization(PolyMesh mesh, DiscretizationOptions options);

    const PolyMesh& mesh() const { return mesh_; }
    const CellClass& classes() const { return classes_; }
    const BasisSet& bases() const { return bases_; }
    const GeoMap& geomap() const { return geomap_; }
    const DiscretizationOptions& options() const { return options_; }
    const QuadratureRule& square_rule() const { return square_rule_; }

    int num_scalar_dofs() const { return bases_.num_dofs(); }
    int components() const { return options_.pde.components(); }
    int num_dofs() const { return num_scalar_dofs() * components(); }

    const std::vector<PolygonBasis>& polygon_bases() const { return polygons_; }
    /// Fitted basis of a polygon cell, or nullptr.
    const PolygonBasis* polygon_basis(int cell) const;

    /// Values at the default quadrature points of the cell.
    ElementValues element_values(int cell) const;
    /// Values at parametric points (quads) or physical points (polygons);
    /// weights are left empty.
    ElementValues evaluate(int cell, std::span<const Vec2> points) const;

    /// Physical image of a parametric point on a quad cell.
    Vec2 map(int cell, const Vec2& xhat) const { return geomap_.map(cell, xhat); }

    /// Global dofs and trace values of the neighbor element along edge k of a
    /// polygon (from vertex k to k+1) at parameter t.
    void polygon_edge_trace(int cell, int k, double t, std::vector<int>& dofs, Eigen::VectorXd& values) const;

    double basis_seconds() const { return basis_seconds_; }
    /// Spline-compatible cells handled as Q2 because their spline map folds.
    int demoted_cells() const { return demoted_; }

    /// Smallest det Dg / cell area accepted for a spline cell.
    static constexpr double kMinRelativeDet = 0.05;

private:
    void build_polygon(int cell);
    ElementValues quad_values(int cell, std::span<const Vec2> params, std::span<const double> weights) const;

    PolyMesh mesh_;
    DiscretizationOptions options_;
    CellClass classes_;
    BasisSet bases_;
    GeoMap geomap_;
    QuadratureRule square_rule_;
    std::vector<PolygonBasis> polygons_;
    std::vector<int> polygon_index_;
    double basis_seconds_ = 0.0;
    int demoted_ = 0;
};

/// Right-hand sides c of the consistency constraints for the dofs `dofs` of a
/// polygon: c(r, l) = -sum over non-polygon cells of int div(S_r) phi + S_r . grad(phi).
Eigen::MatrixXd consistency_rhs(const Discretization& disc, int cell, std::span<const AffineField> fields,
                                std::span<const int> dofs);

} // namespace polyspline
