#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/pde.hpp"
#include "polyspline/quadrature.hpp"
#include "polyspline/types.hpp"

namespace polyspline {

enum class KernelType { InverseDistance, Log };
enum class ConstraintMode { None, Linear, Quadratic };

struct PolyBasisOptions {
    KernelType kernel = KernelType::InverseDistance;
    ConstraintMode constraints = ConstraintMode::Quadratic;
    int samples_per_edge = 10;
    double offset_factor = 1.0;
    int centers_per_vertex = 0; // 0: enough centers for the dof count
    int quad_degree = 6;
    double ridge = 0.0; // penalty on kernel weights
};

/// Kernel value, gradient and Laplacian for a center z.
struct KernelEval {
    double value;
    Vec2 grad;
    double laplacian;
};
KernelEval eval_kernel(KernelType type, const Vec2& x, const Vec2& z);

/// Quadratic monomials 1, X, Y, XY, X^2, Y^2 of the scaled local coordinates
/// X = (x - origin)/scale; gradients are with respect to physical x.
struct MonomialFrame {
    Vec2 origin = Vec2::Zero();
    double scale = 1.0;

    static constexpr int size = 6;
    void eval(const Vec2& x, double* values, Vec2* grads) const;
};

/// Centers offset outward from the boundary: `per_vertex` per edge, the first
/// at the edge's start vertex (along the corner bisector), the rest at
/// equispaced edge points (along the edge normal). The offset is
/// `offset_factor` times the local edge length. A failed strict-outside check
/// is retried once with a doubled offset, then raises CenterInsidePolygon.
std::vector<Vec2> place_kernel_centers(std::span<const Vec2> polygon, int per_vertex, double offset_factor);

struct CollocationPoint {
    Vec2 x;
    int edge;  // edge k runs from vertex k to k+1
    double t;  // parameter along the edge
};

/// `samples_per_edge` equispaced points per edge including both endpoints;
/// shared vertices are kept once.
std::vector<CollocationPoint> sample_collocation(std::span<const Vec2> polygon, int samples_per_edge);

/// Affine vector field S(x) = c + L x; each constraint row is the functional
/// R_S(chi) = int_P div(S) chi + S . grad(chi).
struct AffineField {
    Vec2 c = Vec2::Zero();
    Mat2 L = Mat2::Zero();

    Vec2 at(const Vec2& x) const { return c + L * x; }
    double div() const { return L.trace(); }
};

/// Fields whose functionals make up the consistency constraints: gradients of
/// the non-constant monomials for Poisson, stress rows of the monomial
/// displacements for elasticity; reduced to a linearly independent set.
std::vector<AffineField> constraint_fields(const Pde& pde, ConstraintMode mode, const MonomialFrame& frame);

/// Constraint matrix over the unknowns (kernel weights, then monomial
/// coefficients) by quadrature over the polygon.
Eigen::MatrixXd constraint_rows(std::span<const AffineField> fields, std::span<const Vec2> centers, KernelType kernel,
                                const MonomialFrame& frame, const QuadratureRule& quad);

/// Collocation matrix [psi_i(p) | q_d(p)].
Eigen::MatrixXd collocation_matrix(std::span<const CollocationPoint> points, std::span<const Vec2> centers, KernelType kernel,
                                   const MonomialFrame& frame);

/// Solves min |A x - b| subject to C x = c for every column of (B, Cr) through
/// the augmented KKT system with column equilibration. The first `ridge_cols`
/// unknowns get a penalty ridge*|x|^2 in equilibrated units. Throws
/// RankDeficient when the KKT matrix is numerically singular.
Eigen::MatrixXd solve_constrained_lsq(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& Cr, double* rcond = nullptr, double ridge = 0.0,
                                      int ridge_cols = 0);

/// Fitted nonconforming basis of one polygon: for local dof l the function is
/// sum_i coeffs(i, l) psi_i + sum_d coeffs(k + d, l) q_d.
struct PolygonBasis {
    int cell = -1;
    KernelType kernel = KernelType::InverseDistance;
    std::vector<Vec2> centers;
    MonomialFrame frame;
    std::vector<int> dofs;
    Eigen::MatrixXd coeffs;
    QuadratureRule quad;
    Vec2 star_center = Vec2::Zero();
    double fit_residual = 0.0;        // max collocation misfit over all dofs
    double constraint_residual = 0.0; // max |C x - c|
    double kkt_rcond = 0.0;

    int num_centers() const { return int(centers.size()); }
    Eigen::VectorXd weights(int local) const { return coeffs.col(local).head(num_centers()); }
    Eigen::VectorXd poly_coeffs(int local) const { return coeffs.col(local).tail(MonomialFrame::size); }
    /// Values and physical gradients (columns) of all dofs at x.
    void eval(const Vec2& x, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const;
    /// Row of unknown-space features at x: values and gradients.
    void features(const Vec2& x, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const;
};

} // namespace polyspline
