#pragma once

#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace polyspline {

enum class SolverKind {
    Auto,            // dense Cholesky up to 2000 unknowns, sparse Cholesky above
    Dense,
    SparseCholesky,
    ConjugateGradient,
};

SolverKind solver_from_string(const std::string& name);
std::string to_string(SolverKind kind);

struct SolveStats {
    SolverKind used = SolverKind::Auto;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Solves K u = f for SPD K. Throws NotSPD on factorization failure and
/// NotConverged when CG exceeds 10*N iterations.
Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f, SolverKind kind = SolverKind::Auto,
                      SolveStats* stats = nullptr);

/// lambda_max / lambda_min of a symmetric matrix by dense eigen-decomposition.
/// TooLarge above 3000 rows; NotSPD when lambda_min <= 0.
double condition_number(const Eigen::SparseMatrix<double>& K);

/// Writes "i j value" lines, 0-based.
void write_coordinate(const Eigen::SparseMatrix<double>& K, const std::string& path);

} // namespace polyspline
