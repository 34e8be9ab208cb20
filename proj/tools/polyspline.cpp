#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "polyspline/error.hpp"
#include "polyspline/experiments.hpp"
#include "polyspline/mesh_io.hpp"
#include "polyspline/preprocess.hpp"

using namespace polyspline;

namespace {

struct Overrides {
    std::string config;
    std::string output;
    std::string mesh;
    int n = 0;
    int levels = 0;
    std::vector<std::string> bases;
    std::string constraints;
    std::string solver;
    long long seed = -1;
};

void add_overrides(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("-c,--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("-o,--output", o.output, "output directory");
    cmd->add_option("--mesh", o.mesh, "grid, hybrid or a poly-off file");
    cmd->add_option("-n", o.n, "coarsest grid size")->check(CLI::PositiveNumber);
    cmd->add_option("--levels", o.levels, "refinement levels")->check(CLI::PositiveNumber);
    cmd->add_option("--basis", o.bases, "Q1, Q2 or PolySpline (repeatable)");
    cmd->add_option("--constraints", o.constraints, "none, linear or quadratic");
    cmd->add_option("--solver", o.solver, "auto, dense, cholesky or cg");
    cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
}

ExperimentConfig resolve(const Overrides& o, const std::string& experiment)
{
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (!experiment.empty())
        c.experiment = experiment;
    if (!o.output.empty())
        c.output = o.output;
    if (o.mesh == "grid")
        c.source = MeshSource::Grid;
    else if (o.mesh == "hybrid")
        c.source = MeshSource::Hybrid;
    else if (!o.mesh.empty()) {
        c.source = MeshSource::File;
        c.mesh_path = o.mesh;
    }
    if (o.n > 0)
        c.grid_n = c.hybrid_n = o.n;
    if (o.levels > 0)
        c.levels = o.levels;
    if (!o.bases.empty()) {
        c.modes.clear();
        for (const auto& b : o.bases)
            c.modes.push_back(basis_mode_from_string(b));
    }
    if (!o.constraints.empty())
        c.constraints = constraint_mode_from_string(o.constraints);
    if (!o.solver.empty())
        c.solver = solver_from_string(o.solver);
    if (o.seed >= 0)
        c.seed = std::uint64_t(o.seed);
    if (experiment == "elasticity")
        c.pde = PdeKind::Elasticity;
    // re-validate the merged settings
    return parse_config(config_to_json(c));
}

int preprocess(const std::string& in, const std::string& out, int rings, double target)
{
    const PolyMesh input = read_polyoff(in);
    StarShapeReport report;
    const PolyMesh star = make_star_shaped(input, &report);
    const PolyMesh sep = ensure_separation(star, rings, target);
    write_polyoff(out, sep);
    int polygons = 0;
    for (int f = 0; f < sep.num_faces(); ++f)
        polygons += sep.is_quad(f) ? 0 : 1;
    const nlohmann::json j = {{"input_faces", input.num_faces()},
                              {"output_faces", sep.num_faces()},
                              {"output_vertices", sep.num_vertices()},
                              {"polygons", polygons},
                              {"polygons_fixed", report.polygons_fixed},
                              {"max_iterations", report.max_iterations},
                              {"triangulated", report.triangulated}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Poly-spline finite elements on hybrid 2D meshes"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("-c,--config", run_config, "JSON experiment config")->required()->check(CLI::ExistingFile);

    std::string in, out;
    int rings = 1;
    double target = 0.0;
    auto* pre = app.add_subcommand("preprocess", "make polygons star-shaped and separated");
    pre->add_option("--in", in, "input poly-off mesh")->required()->check(CLI::ExistingFile);
    pre->add_option("--out", out, "output poly-off mesh")->required();
    pre->add_option("--rings", rings, "quad rings per polar refinement")->check(CLI::PositiveNumber);
    pre->add_option("--target-edge", target, "target edge length (0: mesh average)")->check(CLI::NonNegativeNumber);

    const std::vector<std::string> names{"convergence", "ablation", "conditioning", "resilience", "elasticity"};
    std::vector<Overrides> overrides(names.size());
    std::vector<CLI::App*> experiments;
    for (std::size_t i = 0; i < names.size(); ++i) {
        experiments.push_back(app.add_subcommand(names[i], "run the " + names[i] + " experiment"));
        add_overrides(experiments.back(), overrides[i]);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::cout << run_experiment(load_config(run_config)) << '\n';
            return 0;
        }
        if (*pre)
            return preprocess(in, out, rings, target);
        for (std::size_t i = 0; i < names.size(); ++i)
            if (*experiments[i]) {
                std::cout << run_experiment(resolve(overrides[i], names[i])) << '\n';
                return 0;
            }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
