#include "polyspline/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polyspline/error.hpp"
#include "polyspline/franke.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/geometry.hpp"
#include "polyspline/mesh_io.hpp"
#include "polyspline/preprocess.hpp"

namespace polyspline {

using json = nlohmann::json;

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

BasisMode basis_mode_from_string(const std::string& name)
{
    const auto s = lower(name);
    if (s == "q1")
        return BasisMode::Q1;
    if (s == "q2")
        return BasisMode::Q2;
    if (s == "polyspline" || s == "spline")
        return BasisMode::PolySpline;
    throw Error(ErrorCode::InvalidConfig, "unknown basis mode '" + name + "'");
}

std::string to_string(BasisMode mode)
{
    switch (mode) {
    case BasisMode::Q1: return "Q1";
    case BasisMode::Q2: return "Q2";
    case BasisMode::PolySpline: return "PolySpline";
    }
    return "?";
}

ConstraintMode constraint_mode_from_string(const std::string& name)
{
    const auto s = lower(name);
    if (s == "none")
        return ConstraintMode::None;
    if (s == "linear")
        return ConstraintMode::Linear;
    if (s == "quadratic")
        return ConstraintMode::Quadratic;
    throw Error(ErrorCode::InvalidConfig, "unknown constraint mode '" + name + "'");
}

std::string to_string(ConstraintMode mode)
{
    switch (mode) {
    case ConstraintMode::None: return "none";
    case ConstraintMode::Linear: return "linear";
    case ConstraintMode::Quadratic: return "quadratic";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& json_text)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
    ExperimentConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "experiment")
                c.experiment = lower(v.get<std::string>());
            else if (key == "mesh") {
                for (const auto& [mk, mv] : v.items()) {
                    if (mk == "source") {
                        const auto s = lower(mv.get<std::string>());
                        if (s == "grid")
                            c.source = MeshSource::Grid;
                        else if (s == "hybrid")
                            c.source = MeshSource::Hybrid;
                        else if (s == "file")
                            c.source = MeshSource::File;
                        else
                            throw Error(ErrorCode::InvalidConfig, "unknown mesh source '" + s + "'");
                    } else if (mk == "n")
                        c.grid_n = c.hybrid_n = mv.get<int>();
                    else if (mk == "path")
                        c.mesh_path = mv.get<std::string>();
                    else
                        throw Error(ErrorCode::InvalidConfig, "unknown mesh key '" + mk + "'");
                }
            } else if (key == "basis" || key == "bases") {
                c.modes.clear();
                if (v.is_array())
                    for (const auto& m : v)
                        c.modes.push_back(basis_mode_from_string(m.get<std::string>()));
                else
                    c.modes.push_back(basis_mode_from_string(v.get<std::string>()));
            } else if (key == "pde") {
                for (const auto& [pk, pv] : v.items()) {
                    if (pk == "kind") {
                        const auto s = lower(pv.get<std::string>());
                        if (s == "poisson")
                            c.pde = PdeKind::Poisson;
                        else if (s == "elasticity")
                            c.pde = PdeKind::Elasticity;
                        else
                            throw Error(ErrorCode::InvalidConfig, "unknown pde '" + s + "'");
                    } else if (pk == "E")
                        c.young = pv.get<double>();
                    else if (pk == "nu")
                        c.poisson_ratio = pv.get<double>();
                    else if (pk == "exact")
                        c.exact = lower(pv.get<std::string>());
                    else
                        throw Error(ErrorCode::InvalidConfig, "unknown pde key '" + pk + "'");
                }
            } else if (key == "levels")
                c.levels = v.get<int>();
            else if (key == "constraints")
                c.constraints = constraint_mode_from_string(v.get<std::string>());
            else if (key == "kernel") {
                const auto s = lower(v.get<std::string>());
                if (s == "inverse_distance")
                    c.kernel = KernelType::InverseDistance;
                else if (s == "log")
                    c.kernel = KernelType::Log;
                else
                    throw Error(ErrorCode::InvalidConfig, "unknown kernel '" + s + "'");
            } else if (key == "perturbation") {
                for (const auto& [pk, pv] : v.items()) {
                    if (pk == "fraction")
                        c.perturb_fraction = pv.get<double>();
                    else if (pk == "min")
                        c.perturb_lo = pv.get<double>();
                    else if (pk == "max")
                        c.perturb_hi = pv.get<double>();
                    else
                        throw Error(ErrorCode::InvalidConfig, "unknown perturbation key '" + pk + "'");
                }
            } else if (key == "shapes")
                c.resilience_shapes = v.get<int>();
            else if (key == "solver")
                c.solver = solver_from_string(lower(v.get<std::string>()));
            else if (key == "output")
                c.output = v.get<std::string>();
            else if (key == "seed")
                c.seed = v.get<std::uint64_t>();
            else
                throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("bad value type: ") + e.what());
    }
    static const char* known[] = {"convergence", "ablation", "conditioning", "resilience", "elasticity"};
    if (std::find(std::begin(known), std::end(known), c.experiment) == std::end(known))
        throw Error(ErrorCode::InvalidConfig, "unknown experiment '" + c.experiment + "'");
    if (c.levels < 1)
        throw Error(ErrorCode::InvalidConfig, "levels must be positive");
    if (c.modes.empty())
        throw Error(ErrorCode::InvalidConfig, "no basis mode given");
    if (c.source == MeshSource::File && c.mesh_path.empty())
        throw Error(ErrorCode::InvalidConfig, "mesh source 'file' needs a path");
    if (c.grid_n < 1 || (c.source == MeshSource::Hybrid && c.hybrid_n < 5))
        throw Error(ErrorCode::InvalidConfig, "grid size too small");
    if (!(c.perturb_fraction >= 0 && c.perturb_fraction <= 1 && c.perturb_lo <= c.perturb_hi))
        throw Error(ErrorCode::InvalidConfig, "bad perturbation range");
    if (!(c.poisson_ratio > -1 && c.poisson_ratio < 0.5 && c.young > 0))
        throw Error(ErrorCode::InvalidConfig, "bad material parameters");
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

json config_json(const ExperimentConfig& c)
{
    json modes = json::array();
    for (auto m : c.modes)
        modes.push_back(to_string(m));
    const char* src = c.source == MeshSource::Grid ? "grid" : c.source == MeshSource::Hybrid ? "hybrid" : "file";
    json mesh = {{"source", src}, {"n", c.source == MeshSource::Hybrid ? c.hybrid_n : c.grid_n}};
    if (c.source == MeshSource::File)
        mesh["path"] = c.mesh_path;
    return {{"experiment", c.experiment},
            {"mesh", mesh},
            {"basis", modes},
            {"pde",
             {{"kind", c.pde == PdeKind::Poisson ? "poisson" : "elasticity"},
              {"E", c.young},
              {"nu", c.poisson_ratio},
              {"exact", c.exact}}},
            {"levels", c.levels},
            {"constraints", to_string(c.constraints)},
            {"kernel", c.kernel == KernelType::Log ? "log" : "inverse_distance"},
            {"perturbation", {{"fraction", c.perturb_fraction}, {"min", c.perturb_lo}, {"max", c.perturb_hi}}},
            {"shapes", c.resilience_shapes},
            {"solver", to_string(c.solver)},
            {"output", c.output},
            {"seed", c.seed}};
}

} // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::vector<PolyMesh> level_meshes(const ExperimentConfig& config)
{
    std::vector<PolyMesh> out;
    if (config.source == MeshSource::Grid) {
        for (int l = 0; l < config.levels; ++l) {
            const int n = config.grid_n << l;
            out.push_back(regular_grid(n, n));
        }
        return out;
    }
    PolyMesh base = config.source == MeshSource::Hybrid
                        ? hybrid_cross_mesh(config.hybrid_n)
                        : ensure_separation(make_star_shaped(read_polyoff(config.mesh_path)));
    out.push_back(std::move(base));
    for (int l = 1; l < config.levels; ++l)
        out.push_back(uniform_refine(out.back()));
    return out;
}

PipelineResult run_pipeline(const Discretization& disc, const ProblemSpec& problem, SolverKind solver)
{
    PipelineResult r;
    r.t_basis = disc.basis_seconds();
    auto t0 = std::chrono::steady_clock::now();
    const SparseMatrix K = assemble_stiffness(disc);
    Eigen::VectorXd f = assemble_rhs(disc, problem.source);
    if (problem.is_neumann)
        apply_neumann(disc, problem.neumann, problem.is_neumann, f);
    const auto fit = fit_dirichlet(disc, problem.dirichlet, problem.is_neumann);
    const auto sys = apply_dirichlet(K, f, fit);
    r.t_assembly = seconds_since(t0);
    r.nnz = long(K.nonZeros());
    r.num_dofs = disc.num_dofs();

    t0 = std::chrono::steady_clock::now();
    SolveStats stats;
    const Eigen::VectorXd uf = sys.free_dofs.empty() ? Eigen::VectorXd() : solve(sys.K_free, sys.f_free, solver, &stats);
    r.t_solve = seconds_since(t0);
    r.relative_residual = stats.relative_residual;
    r.u = sys.expand(uf);
    if (problem.exact)
        r.norms = error_norms(disc, r.u, problem.exact, problem.exact_gradient);
    return r;
}

PipelineResult run_pipeline(const PolyMesh& mesh, const DiscretizationOptions& options, const ProblemSpec& problem,
                            SolverKind solver)
{
    const Discretization disc(mesh, options);
    return run_pipeline(disc, problem, solver);
}

double fitted_rate(const std::vector<double>& h, const std::vector<double>& err)
{
    const int n = int(std::min(h.size(), err.size()));
    if (n < 2)
        return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double median_rate(const std::vector<double>& h, const std::vector<double>& err)
{
    std::vector<double> s;
    for (std::size_t i = 1; i < std::min(h.size(), err.size()); ++i)
        s.push_back(std::log(err[i] / err[i - 1]) / std::log(h[i] / h[i - 1]));
    if (s.empty())
        return 0.0;
    std::sort(s.begin(), s.end());
    const std::size_t m = s.size() / 2;
    return s.size() % 2 ? s[m] : 0.5 * (s[m - 1] + s[m]);
}

Rates compute_rates(const std::vector<LevelRecord>& levels)
{
    Rates r;
    std::vector<double> h, l2, linf, h1;
    for (const auto& l : levels) {
        h.push_back(l.h);
        l2.push_back(l.l2);
        linf.push_back(l.linf);
        h1.push_back(l.h1);
    }
    r.valid = levels.size() >= 3;
    if (levels.size() < 2)
        return r;
    r.l2 = fitted_rate(h, l2);
    r.linf = fitted_rate(h, linf);
    r.h1 = fitted_rate(h, h1);
    r.l2_median = median_rate(h, l2);
    r.linf_median = median_rate(h, linf);
    r.h1_median = median_rate(h, h1);
    return r;
}

namespace {

ProblemSpec problem_for(const ExperimentConfig& c)
{
    if (c.pde == PdeKind::Poisson)
        return franke_poisson_problem();
    const Pde pde = Pde::elasticity(c.young, c.poisson_ratio);
    if (c.exact == "translation")
        return rigid_translation_problem(pde, Vec2(0.3, -0.7));
    return manufactured_elasticity_problem(pde);
}

DiscretizationOptions options_for(const ExperimentConfig& c, BasisMode mode, const ProblemSpec& problem)
{
    DiscretizationOptions o;
    o.mode = mode;
    o.pde = problem.pde;
    o.poly.kernel = c.kernel;
    o.poly.constraints = c.constraints;
    return o;
}

ConvergenceRecord sweep(const ExperimentConfig& c, BasisMode mode, const ProblemSpec& problem, const std::string& label)
{
    ConvergenceRecord rec;
    rec.label = label;
    const auto meshes = level_meshes(c);
    for (int l = 0; l < int(meshes.size()); ++l) {
        LevelRecord lr;
        lr.level = l;
        lr.h = meshes[l].max_edge_length();
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const Discretization disc(meshes[l], options_for(c, mode, problem));
            const double t_build = seconds_since(t0);
            const auto r = run_pipeline(disc, problem, c.solver);
            lr.t_basis = t_build;
            lr.num_dofs = r.num_dofs;
            lr.nnz = r.nnz;
            lr.l2 = r.norms.l2;
            lr.linf = r.norms.linf;
            lr.h1 = r.norms.h1;
            lr.t_assembly = r.t_assembly;
            lr.t_solve = r.t_solve;
        } catch (const Error& e) {
            throw Error(e.code(), label + " level " + std::to_string(l) + ": " + e.what());
        }
        rec.levels.push_back(lr);
    }
    rec.rates = compute_rates(rec.levels);
    return rec;
}

} // namespace

ConvergenceRecord run_convergence(const ExperimentConfig& config, BasisMode mode)
{
    return sweep(config, mode, problem_for(config), to_string(mode));
}

std::vector<ConvergenceRecord> run_constraint_ablation(const ExperimentConfig& config)
{
    std::vector<ConvergenceRecord> out;
    for (auto cm : {ConstraintMode::None, ConstraintMode::Linear, ConstraintMode::Quadratic}) {
        ExperimentConfig c = config;
        c.constraints = cm;
        out.push_back(sweep(c, BasisMode::PolySpline, problem_for(c), to_string(cm)));
    }
    return out;
}

ConvergenceRecord run_elasticity(const ExperimentConfig& config, BasisMode mode)
{
    ExperimentConfig c = config;
    c.pde = PdeKind::Elasticity;
    if (c.exact == "franke")
        c.exact = "trig";
    return sweep(c, mode, problem_for(c), to_string(mode));
}

std::vector<ConditioningRow> run_conditioning(const ExperimentConfig& config)
{
    std::vector<ConditioningRow> rows;
    ExperimentConfig c = config;
    c.source = MeshSource::Grid;
    const auto meshes = level_meshes(c);
    const ProblemSpec zero = [] {
        ProblemSpec p;
        p.dirichlet = [](const Vec2&) { return Vec2::Zero(); };
        return p;
    }();
    for (int l = 0; l < int(meshes.size()); ++l) {
        const auto pm = perturb_and_mark(meshes[l], c.perturb_fraction, c.perturb_lo, c.perturb_hi, c.seed + std::uint64_t(l));
        for (BasisMode mode : c.modes)
            for (bool perturbed : {false, true}) {
                auto opts = options_for(c, mode, zero);
                opts.pde = Pde::poisson();
                if (perturbed)
                    opts.extra_polygons = pm.marked;
                const Discretization disc(perturbed ? pm.mesh : meshes[l], opts);
                const auto K = assemble_stiffness(disc);
                const auto sys = apply_dirichlet(K, Eigen::VectorXd::Zero(K.rows()), fit_dirichlet(disc, zero.dirichlet));
                ConditioningRow row;
                row.level = l;
                row.n = c.grid_n << l;
                row.mode = mode;
                row.perturbed = perturbed;
                row.polygons = perturbed ? int(pm.marked.size()) : 0;
                row.num_dofs = int(sys.free_dofs.size());
                row.cond = condition_number(sys.K_free);
                rows.push_back(row);
            }
    }
    return rows;
}

std::vector<std::pair<std::string, PolyMesh>> resilience_shapes(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double hc = 0.1;
    std::vector<std::pair<std::string, PolyMesh>> out;
    // central cell of a 4x4-vertex patch: vertices 5, 6, 10, 9 (CCW)
    const int center[4] = {5, 6, 10, 9};
    auto valid = [](const PolyMesh& m) {
        for (int f = 0; f < m.num_faces(); ++f) {
            const auto p = m.face_points(f);
            for (int k = 0; k < 4; ++k)
                if (geometry::orient(p[k], p[(k + 1) % 4], p[(k + 2) % 4]) <= 1e-8)
                    return false;
        }
        return true;
    };
    for (int s = 0; int(out.size()) < count + 1 && s < 100 * (count + 1); ++s) {
        const Vec2 origin(0.1 + 0.5 * U(rng), 0.1 + 0.5 * U(rng));
        PolyMesh grid = regular_grid(3, 3, origin, origin + Vec2(3 * hc, 3 * hc));
        auto v = grid.vertices();
        std::string name;
        if (out.empty()) {
            name = "square";
        } else {
            const int k = int(U(rng) * 4) % 4;
            const int a = center[k], b = center[(k + 1) % 4], o = center[(k + 2) % 4];
            if (out.size() % 2 == 1) { // corner pushed almost onto the opposite diagonal
                const double t = 0.46 + 0.035 * U(rng);
                v[a] += t * (v[o] - v[a]);
                name = "push";
            } else { // edge collapsed to a sliver
                const double t = 0.40 + 0.07 * U(rng);
                const Vec2 d = v[b] - v[a];
                v[a] += t * d;
                v[b] -= t * d;
                name = "taper";
            }
            name += std::to_string(out.size());
        }
        PolyMesh m(v, grid.face_list());
        if (!valid(m))
            continue;
        out.emplace_back(name, std::move(m));
    }
    return out;
}

ResilienceRow resilience_case(const PolyMesh& patch, int cell, const std::string& name)
{
    ResilienceRow row;
    row.shape = name;
    std::vector<Vec2> params;
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i)
            params.emplace_back(0.25 * i, 0.25 * j);

    auto measure = [&](const Discretization& disc, const std::vector<Vec2>& sample_pts, double& l2, double& linf) {
        const auto ev = disc.element_values(cell);
        const auto W = Eigen::Map<const Eigen::VectorXd>(ev.weights.data(), ev.weights.size());
        Eigen::VectorXd fv(ev.points.size());
        for (std::size_t q = 0; q < ev.points.size(); ++q)
            fv(q) = franke(ev.points[q]);
        const Eigen::MatrixXd M = ev.values.transpose() * W.asDiagonal() * ev.values;
        const Eigen::VectorXd b = ev.values.transpose() * W.asDiagonal() * fv;
        const Eigen::VectorXd c = M.ldlt().solve(b);
        double s = 0.0;
        for (std::size_t q = 0; q < ev.points.size(); ++q) {
            const Vec2 g(ev.dx.row(q).dot(c), ev.dy.row(q).dot(c));
            s += ev.weights[q] * (g - franke_gradient(ev.points[q])).squaredNorm();
        }
        l2 = std::sqrt(s);
        const auto sv = disc.evaluate(cell, sample_pts);
        linf = 0.0;
        for (std::size_t q = 0; q < sample_pts.size(); ++q) {
            const Vec2 g(sv.dx.row(q).dot(c), sv.dy.row(q).dot(c));
            linf = std::max(linf, (g - franke_gradient(sv.points[q])).norm());
        }
    };

    DiscretizationOptions q2;
    q2.mode = BasisMode::Q2;
    const Discretization dq(patch, q2);
    measure(dq, params, row.q2_l2, row.q2_linf);

    std::vector<Vec2> physical;
    for (const auto& p : params)
        physical.push_back(dq.map(cell, p));
    // same physical sample points for the harmonic basis
    DiscretizationOptions pp;
    pp.mode = BasisMode::PolySpline;
    pp.extra_polygons = {cell};
    const Discretization dp(patch, pp);
    measure(dp, physical, row.poly_l2, row.poly_linf);
    row.ratio_l2 = row.q2_l2 / row.poly_l2;
    row.ratio_linf = row.q2_linf / row.poly_linf;
    return row;
}

std::vector<ResilienceRow> run_interpolation_resilience(const ExperimentConfig& config)
{
    std::vector<ResilienceRow> rows;
    for (const auto& [name, mesh] : resilience_shapes(config.resilience_shapes, config.seed))
        rows.push_back(resilience_case(mesh, 4, name));
    return rows;
}

void write_convergence_csv(const std::string& path, const ConvergenceRecord& record)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot write " + path);
    out << "level,h,N,L2,Linf,H1,t_basis,t_assembly,t_solve\n" << std::setprecision(10);
    for (const auto& l : record.levels)
        out << l.level << ',' << l.h << ',' << l.num_dofs << ',' << l.l2 << ',' << l.linf << ',' << l.h1 << ','
            << l.t_basis << ',' << l.t_assembly << ',' << l.t_solve << '\n';
}

namespace {

json record_json(const ConvergenceRecord& r)
{
    json levels = json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"level", l.level}, {"h", l.h}, {"N", l.num_dofs}, {"nnz", l.nnz}, {"L2", l.l2},
                          {"Linf", l.linf}, {"H1", l.h1}, {"t_basis", l.t_basis}, {"t_assembly", l.t_assembly},
                          {"t_solve", l.t_solve}});
    json rates = nullptr;
    if (r.levels.size() >= 2)
        rates = {{"L2", r.rates.l2}, {"Linf", r.rates.linf}, {"H1", r.rates.h1}, {"L2_median", r.rates.l2_median},
                 {"Linf_median", r.rates.linf_median}, {"H1_median", r.rates.h1_median}, {"reliable", r.rates.valid}};
    return {{"label", r.label}, {"rates", rates}, {"levels", levels}};
}

std::string slug(std::string s)
{
    for (auto& ch : s)
        if (!std::isalnum(static_cast<unsigned char>(ch)))
            ch = '_';
    return lower(s);
}

} // namespace

std::string run_experiment(const ExperimentConfig& config)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create " + config.output + ": " + ec.message());
    const fs::path dir(config.output);
    json summary = {{"experiment", config.experiment}, {"seed", config.seed}, {"config", config_json(config)}};

    auto emit_records = [&](const std::vector<ConvergenceRecord>& recs) {
        json arr = json::array();
        for (const auto& r : recs) {
            write_convergence_csv((dir / (config.experiment + "_" + slug(r.label) + ".csv")).string(), r);
            arr.push_back(record_json(r));
        }
        summary["records"] = arr;
    };

    if (config.experiment == "convergence") {
        std::vector<ConvergenceRecord> recs;
        for (auto m : config.modes)
            recs.push_back(config.pde == PdeKind::Elasticity ? run_elasticity(config, m) : run_convergence(config, m));
        emit_records(recs);
    } else if (config.experiment == "elasticity") {
        std::vector<ConvergenceRecord> recs;
        for (auto m : config.modes)
            recs.push_back(run_elasticity(config, m));
        emit_records(recs);
    } else if (config.experiment == "ablation") {
        emit_records(run_constraint_ablation(config));
    } else if (config.experiment == "conditioning") {
        const auto rows = run_conditioning(config);
        const auto path = dir / "conditioning.csv";
        std::ofstream out(path);
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + path.string());
        out << "# seed=" << config.seed << '\n' << "level,n,basis,perturbed,polygons,N,cond\n" << std::setprecision(10);
        json arr = json::array();
        for (const auto& r : rows) {
            out << r.level << ',' << r.n << ',' << to_string(r.mode) << ',' << int(r.perturbed) << ',' << r.polygons << ','
                << r.num_dofs << ',' << r.cond << '\n';
            arr.push_back({{"level", r.level}, {"n", r.n}, {"basis", to_string(r.mode)}, {"perturbed", r.perturbed},
                           {"polygons", r.polygons}, {"N", r.num_dofs}, {"cond", r.cond}});
        }
        summary["rows"] = arr;
    } else if (config.experiment == "resilience") {
        const auto rows = run_interpolation_resilience(config);
        const auto path = dir / "resilience.csv";
        std::ofstream out(path);
        if (!out)
            throw Error(ErrorCode::Io, "cannot write " + path.string());
        out << "# seed=" << config.seed << '\n'
            << "shape,q2_L2,q2_Linf,poly_L2,poly_Linf,ratio_L2,ratio_Linf\n"
            << std::setprecision(10);
        json arr = json::array();
        double mean_l2 = 0.0, mean_linf = 0.0;
        int bad = 0;
        for (const auto& r : rows) {
            out << r.shape << ',' << r.q2_l2 << ',' << r.q2_linf << ',' << r.poly_l2 << ',' << r.poly_linf << ','
                << r.ratio_l2 << ',' << r.ratio_linf << '\n';
            arr.push_back({{"shape", r.shape}, {"ratio_L2", r.ratio_l2}, {"ratio_Linf", r.ratio_linf}});
            if (r.shape != "square") {
                mean_l2 += r.ratio_l2;
                mean_linf += r.ratio_linf;
                ++bad;
            }
        }
        summary["rows"] = arr;
        summary["mean_ratio_L2"] = bad ? mean_l2 / bad : 0.0;
        summary["mean_ratio_Linf"] = bad ? mean_linf / bad : 0.0;
    }
    const std::string text = summary.dump(2);
    std::ofstream js(dir / "summary.json");
    if (!js)
        throw Error(ErrorCode::Io, "cannot write summary.json");
    js << text << '\n';
    return text;
}

} // namespace polyspline
