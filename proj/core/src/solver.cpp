#include "polyspline/solver.hpp"

#include <fstream>
#include <iomanip>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "polyspline/error.hpp"

namespace polyspline {

SolverKind solver_from_string(const std::string& name)
{
    if (name == "auto")
        return SolverKind::Auto;
    if (name == "dense")
        return SolverKind::Dense;
    if (name == "cholesky" || name == "sparse")
        return SolverKind::SparseCholesky;
    if (name == "cg")
        return SolverKind::ConjugateGradient;
    throw Error(ErrorCode::InvalidConfig, "unknown solver '" + name + "'");
}

std::string to_string(SolverKind kind)
{
    switch (kind) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Dense: return "dense";
    case SolverKind::SparseCholesky: return "cholesky";
    case SolverKind::ConjugateGradient: return "cg";
    }
    return "?";
}

Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& f, SolverKind kind, SolveStats* stats)
{
    const Eigen::Index n = K.rows();
    if (kind == SolverKind::Auto)
        kind = n <= 2000 ? SolverKind::Dense : SolverKind::SparseCholesky;
    Eigen::VectorXd u;
    int iterations = 0;
    switch (kind) {
    case SolverKind::Dense: {
        Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(K)};
        if (llt.info() != Eigen::Success)
            throw Error(ErrorCode::NotSPD, "dense Cholesky failed");
        u = llt.solve(f);
        break;
    }
    case SolverKind::SparseCholesky: {
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K);
        if (llt.info() != Eigen::Success)
            throw Error(ErrorCode::NotSPD, "sparse Cholesky failed");
        u = llt.solve(f);
        break;
    }
    case SolverKind::ConjugateGradient: {
        Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                                 Eigen::DiagonalPreconditioner<double>> cg(K);
        cg.setTolerance(1e-10);
        cg.setMaxIterations(int(10 * n));
        u = cg.solve(f);
        iterations = int(cg.iterations());
        if (cg.info() != Eigen::Success)
            throw Error(ErrorCode::NotConverged, "CG stopped at residual " + std::to_string(cg.error()));
        break;
    }
    case SolverKind::Auto: break;
    }
    if (stats) {
        stats->used = kind;
        stats->iterations = iterations;
        const double nf = f.norm();
        stats->relative_residual = nf > 0 ? (K * u - f).norm() / nf : (K * u).norm();
    }
    return u;
}

double condition_number(const Eigen::SparseMatrix<double>& K)
{
    if (K.rows() > 3000)
        throw Error(ErrorCode::TooLarge, "condition number limited to 3000 unknowns, got " + std::to_string(K.rows()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(K), Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    if (ev.size() == 0)
        return 1.0;
    if (ev(0) <= 0.0)
        throw Error(ErrorCode::NotSPD, "matrix has a non-positive eigenvalue");
    return ev(ev.size() - 1) / ev(0);
}

void write_coordinate(const Eigen::SparseMatrix<double>& K, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path);
    out << std::setprecision(17);
    for (int c = 0; c < K.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, c); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

} // namespace polyspline
