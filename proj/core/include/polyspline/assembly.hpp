#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "polyspline/discretization.hpp"
#include "polyspline/pde.hpp"

namespace polyspline {

using SparseMatrix = Eigen::SparseMatrix<double>;
using EdgePredicate = std::function<bool(const Vec2& midpoint)>;

/// Local stiffness of one element for the discretization's PDE; rows and
/// columns follow comps*dofs[a] + c.
Eigen::MatrixXd element_stiffness(const ElementValues& ev, const Pde& pde);

SparseMatrix assemble_stiffness(const Discretization& disc);
/// Mass matrix of the scalar basis.
SparseMatrix assemble_mass(const Discretization& disc);
Eigen::VectorXd assemble_rhs(const Discretization& disc, const FieldFn& source);

/// Adds edge integrals of `flux` against the basis on boundary edges selected
/// by `on_edge` (all boundary edges when empty).
void apply_neumann(const Discretization& disc, const FieldFn& flux, const EdgePredicate& on_edge, Eigen::VectorXd& f);

struct DirichletFit {
    std::vector<int> dofs; // global (vector) dofs fixed by the fit
    Eigen::VectorXd values;
    double max_sample_misfit = 0.0;
};

/// Least-squares fit of boundary dofs to `data` sampled at `samples_per_edge`
/// points of every Dirichlet edge (edges not selected by `is_neumann`).
DirichletFit fit_dirichlet(const Discretization& disc, const FieldFn& data, const EdgePredicate& is_neumann = {},
                           int samples_per_edge = 7);

struct SparseSystem {
    SparseMatrix K;        // full matrix
    Eigen::VectorXd f;     // full right-hand side
    std::vector<char> fixed;
    Eigen::VectorXd fixed_values;
    std::vector<int> free_dofs;
    SparseMatrix K_free;   // reduced after elimination
    Eigen::VectorXd f_free;

    /// Full dof vector from the free unknowns.
    Eigen::VectorXd expand(const Eigen::VectorXd& u_free) const;
};

/// Eliminates the fitted dofs, moving their columns to the right-hand side.
SparseSystem apply_dirichlet(const SparseMatrix& K, const Eigen::VectorXd& f, const DirichletFit& fit);

/// Boundary trace misfit at points not used by the fit.
double dirichlet_trace_error(const Discretization& disc, const Eigen::VectorXd& u, const FieldFn& data,
                             const EdgePredicate& is_neumann = {}, int samples_per_edge = 11);

struct ErrorNorms {
    double l2 = 0.0;
    double linf = 0.0;
    double h1 = 0.0;      // full norm
    double h1_semi = 0.0;
};

/// L2 and H1 by quadrature over all cells, L-infinity over a 5x5 sample grid
/// per quad (and a matching fan sampling on polygons).
ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u, const FieldFn& exact, const GradientFn& gradient);

/// Dof vector whose non-polygon cells best match `field` in least squares
/// over a 5x5 parametric sample grid per quad; exact for fields in the span.
Eigen::VectorXd fit_field(const Discretization& disc, const FieldFn& field);

/// u_h at a parametric (quad) or physical (polygon) point of a cell.
Vec2 evaluate_solution(const Discretization& disc, const Eigen::VectorXd& u, int cell, const Vec2& point);

} // namespace polyspline
