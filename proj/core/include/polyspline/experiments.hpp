#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polyspline/assembly.hpp"
#include "polyspline/discretization.hpp"
#include "polyspline/mesh.hpp"
#include "polyspline/pde.hpp"
#include "polyspline/solver.hpp"

namespace polyspline {

enum class MeshSource { Grid, Hybrid, File };

struct ExperimentConfig {
    std::string experiment = "convergence"; // convergence | ablation | conditioning | resilience | elasticity
    MeshSource source = MeshSource::Grid;
    int grid_n = 8;           // coarsest grid
    int hybrid_n = 5;         // base grid of the hybrid mesh
    std::string mesh_path;    // MeshSource::File
    std::vector<BasisMode> modes{BasisMode::PolySpline};
    PdeKind pde = PdeKind::Poisson;
    double young = 200.0;
    double poisson_ratio = 0.35;
    std::string exact = "franke"; // franke | trig | translation
    int levels = 5;
    ConstraintMode constraints = ConstraintMode::Quadratic;
    KernelType kernel = KernelType::InverseDistance;
    double perturb_fraction = 0.05;
    double perturb_lo = 0.2;
    double perturb_hi = 0.4;
    int resilience_shapes = 14;
    SolverKind solver = SolverKind::Auto;
    std::string output = "results";
    std::uint64_t seed = 42;
};

/// Parses a JSON config; unknown keys raise InvalidConfig.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);

BasisMode basis_mode_from_string(const std::string& name);
std::string to_string(BasisMode mode);
ConstraintMode constraint_mode_from_string(const std::string& name);
std::string to_string(ConstraintMode mode);

/// Mesh sequence of `config.levels` meshes: doubled grids, or uniform
/// refinements of the hybrid / file mesh.
std::vector<PolyMesh> level_meshes(const ExperimentConfig& config);

struct PipelineResult {
    Eigen::VectorXd u;
    int num_dofs = 0;
    long nnz = 0;
    ErrorNorms norms;
    double t_basis = 0.0;
    double t_assembly = 0.0;
    double t_solve = 0.0;
    double relative_residual = 0.0;
};

/// Discretize, assemble, impose boundary data, solve and measure errors.
PipelineResult run_pipeline(const Discretization& disc, const ProblemSpec& problem, SolverKind solver = SolverKind::Auto);
PipelineResult run_pipeline(const PolyMesh& mesh, const DiscretizationOptions& options, const ProblemSpec& problem,
                            SolverKind solver = SolverKind::Auto);

struct LevelRecord {
    int level = 0;
    double h = 0.0;
    int num_dofs = 0;
    long nnz = 0;
    double l2 = 0.0, linf = 0.0, h1 = 0.0;
    double t_basis = 0.0, t_assembly = 0.0, t_solve = 0.0;
};

struct Rates {
    bool valid = false; // needs three levels
    double l2 = 0.0, linf = 0.0, h1 = 0.0;                      // least squares
    double l2_median = 0.0, linf_median = 0.0, h1_median = 0.0; // pairwise slopes
};

struct ConvergenceRecord {
    std::string label;
    std::vector<LevelRecord> levels;
    Rates rates;
};

/// Least-squares slope of log(err) against log(h).
double fitted_rate(const std::vector<double>& h, const std::vector<double>& err);
/// Median of the consecutive-level slopes.
double median_rate(const std::vector<double>& h, const std::vector<double>& err);
Rates compute_rates(const std::vector<LevelRecord>& levels);

ConvergenceRecord run_convergence(const ExperimentConfig& config, BasisMode mode);
/// Same sweep with constraint modes none, linear and quadratic.
std::vector<ConvergenceRecord> run_constraint_ablation(const ExperimentConfig& config);
ConvergenceRecord run_elasticity(const ExperimentConfig& config, BasisMode mode = BasisMode::PolySpline);

struct ConditioningRow {
    int level = 0;
    int n = 0;
    BasisMode mode = BasisMode::Q1;
    bool perturbed = false;
    int polygons = 0;
    int num_dofs = 0;
    double cond = 0.0;
};

/// Condition numbers of the reduced Poisson matrix on n x n grids, plain and
/// with a marked fraction of quads turned into distorted polygons.
std::vector<ConditioningRow> run_conditioning(const ExperimentConfig& config);

struct ResilienceRow {
    std::string shape;
    double q2_l2 = 0.0, q2_linf = 0.0;
    double poly_l2 = 0.0, poly_linf = 0.0;
    double ratio_l2 = 0.0, ratio_linf = 0.0;
};

/// Least-squares projection of Franke on a single bad element, Q2 against the
/// harmonic polygon basis; errors are measured on the gradient.
ResilienceRow resilience_case(const PolyMesh& patch, int cell, const std::string& name);
/// 3x3 patches whose center cell has a near-degenerate corner; the first
/// entry is an undistorted square, followed by `count` distorted ones.
std::vector<std::pair<std::string, PolyMesh>> resilience_shapes(int count, std::uint64_t seed);
std::vector<ResilienceRow> run_interpolation_resilience(const ExperimentConfig& config);

void write_convergence_csv(const std::string& path, const ConvergenceRecord& record);

/// Runs `config.experiment`, writes CSV files and summary.json into
/// `config.output`, and returns the summary text.
std::string run_experiment(const ExperimentConfig& config);

} // namespace polyspline
