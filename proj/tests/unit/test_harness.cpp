#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "polyspline/error.hpp"
#include "polyspline/experiments.hpp"
#include "polyspline/franke.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/preprocess.hpp"

using namespace polyspline;
namespace fs = std::filesystem;

namespace {

// Franke's function written out term by term.
double franke_direct(double x, double y)
{
    const double a = 0.75 * std::exp(-std::pow(9 * x - 2, 2) / 4 - std::pow(9 * y - 2, 2) / 4);
    const double b = 0.75 * std::exp(-std::pow(9 * x + 1, 2) / 49 - (9 * y + 1) / 10);
    const double c = 0.5 * std::exp(-std::pow(9 * x - 7, 2) / 4 - std::pow(9 * y - 3, 2) / 4);
    const double d = -0.2 * std::exp(-std::pow(9 * x - 4, 2) - std::pow(9 * y - 7, 2));
    return a + b + c + d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ErrorCode config_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("config accepted: " << text);
    return ErrorCode::Io;
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("polyspline_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("Franke function")
{
    CHECK(franke(Vec2(0.5, 0.5)) == doctest::Approx(franke_direct(0.5, 0.5)).epsilon(1e-15));
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0, 1);
    const double h = 1e-5;
    for (int k = 0; k < 5; ++k) {
        const Vec2 p(U(rng), U(rng));
        CHECK(franke(p) == doctest::Approx(franke_direct(p.x(), p.y())).epsilon(1e-14));
        const Vec2 fd((franke_direct(p.x() + h, p.y()) - franke_direct(p.x() - h, p.y())) / (2 * h),
                      (franke_direct(p.x(), p.y() + h) - franke_direct(p.x(), p.y() - h)) / (2 * h));
        CHECK((franke_gradient(p) - fd).norm() < 1e-6);
        const double hh = 1e-4;
        const double lap = (franke_direct(p.x() + hh, p.y()) + franke_direct(p.x() - hh, p.y()) +
                            franke_direct(p.x(), p.y() + hh) + franke_direct(p.x(), p.y() - hh) - 4 * franke(p)) /
                           (hh * hh);
        CHECK(franke_laplacian(p) == doctest::Approx(lap).epsilon(1e-5).scale(1.0));
        const Mat2 H = franke_hessian(p);
        CHECK(std::abs(H(0, 1) - H(1, 0)) < 1e-12);
    }
    double mx = -1e300;
    for (int j = 0; j < 100; ++j)
        for (int i = 0; i < 100; ++i)
            mx = std::max(mx, franke(Vec2(i / 99.0, j / 99.0)));
    CHECK(mx < 1.3);
    CHECK(mx > 1.0);

    const auto p = franke_poisson_problem();
    const Vec2 x(0.3, 0.8);
    CHECK(p.source(x).x() == doctest::Approx(-franke_laplacian(x)));
    CHECK(p.dirichlet(x).x() == franke(x));
}

TEST_CASE("manufactured elasticity body force")
{
    const Pde pde = Pde::elasticity(200, 0.35);
    const auto pr = manufactured_elasticity_problem(pde);
    auto sigma = [&](const Vec2& x) {
        const Mat2 G = pr.exact_gradient(x);
        const Mat2 e = 0.5 * (G + G.transpose());
        return Mat2(pde.lambda * e.trace() * Mat2::Identity() + 2 * pde.mu * e);
    };
    const double h = 1e-5;
    for (const Vec2 x : {Vec2(0.2, 0.3), Vec2(0.7, 0.55)}) {
        const Mat2 dsx = (sigma(x + Vec2(h, 0)) - sigma(x - Vec2(h, 0))) / (2 * h);
        const Mat2 dsy = (sigma(x + Vec2(0, h)) - sigma(x - Vec2(0, h))) / (2 * h);
        const Vec2 div = dsx.col(0) + dsy.col(1);
        CHECK((pr.source(x) + div).norm() < 1e-5 * pde.lambda);
        const Vec2 ufd = (pr.exact(x + Vec2(h, 0)) - pr.exact(x - Vec2(h, 0))) / (2 * h);
        CHECK((pr.exact_gradient(x).col(0) - ufd).norm() < 1e-8);
    }
}

TEST_CASE("rigid translation is reproduced at every level")
{
    const Pde pde = Pde::elasticity(200, 0.35);
    const auto pr = rigid_translation_problem(pde, Vec2(0.3, -0.7));
    DiscretizationOptions opt;
    opt.pde = pde;
    for (const auto& m : {regular_grid(4, 4), regular_grid(8, 8), hybrid_cross_mesh(5), uniform_refine(hybrid_cross_mesh(5))}) {
        const auto r = run_pipeline(m, opt, pr);
        CHECK(r.norms.l2 <= 1e-9);
        CHECK(r.norms.linf <= 1e-9);
    }
}

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"({"experiment":"ablation","mesh":{"source":"hybrid","n":7},
        "bases":["Q2","polyspline"],"levels":3,"constraints":"linear","kernel":"log",
        "perturbation":{"fraction":0.1,"min":0.2,"max":0.3},"solver":"cg","seed":9,"output":"x"})");
    CHECK(c.experiment == "ablation");
    CHECK(c.source == MeshSource::Hybrid);
    CHECK(c.hybrid_n == 7);
    CHECK(c.modes.size() == 2);
    CHECK(c.modes[0] == BasisMode::Q2);
    CHECK(c.constraints == ConstraintMode::Linear);
    CHECK(c.kernel == KernelType::Log);
    CHECK(c.solver == SolverKind::ConjugateGradient);
    CHECK(c.seed == 9);

    const auto back = parse_config(config_to_json(c));
    CHECK(back.experiment == c.experiment);
    CHECK(back.hybrid_n == c.hybrid_n);
    CHECK(back.modes == c.modes);
    CHECK(back.perturb_fraction == c.perturb_fraction);
    CHECK(back.seed == c.seed);

    CHECK(config_error("{\"levels\": 3, \"mesh_size\": 4}") == ErrorCode::InvalidConfig);
    CHECK(config_error("{\"levels\": \"three\"}") == ErrorCode::InvalidConfig);
    CHECK(config_error("{\"experiment\": \"fly\"}") == ErrorCode::InvalidConfig);
    CHECK(config_error("{\"basis\": \"Q7\"}") == ErrorCode::InvalidConfig);
    CHECK(config_error("[1, 2]") == ErrorCode::InvalidConfig);
    CHECK(config_error("{oops") == ErrorCode::InvalidConfig);
    CHECK(config_error("{\"mesh\": {\"source\": \"file\"}}") == ErrorCode::InvalidConfig);
    try {
        load_config("/nonexistent/config.json");
        FAIL("expected Io");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
    }
}

TEST_CASE("rate estimators")
{
    const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
    std::vector<double> e;
    for (double x : h)
        e.push_back(3.0 * x * x * x);
    CHECK(fitted_rate(h, e) == doctest::Approx(3.0));
    CHECK(median_rate(h, e) == doctest::Approx(3.0));

    ExperimentConfig cfg;
    cfg.grid_n = 4;
    cfg.levels = 4;
    for (auto mode : {BasisMode::Q1, BasisMode::Q2, BasisMode::PolySpline}) {
        const auto rec = run_convergence(cfg, mode);
        REQUIRE(rec.levels.size() == 4);
        CHECK(rec.rates.valid);
        for (std::size_t i = 1; i < rec.levels.size(); ++i)
            CHECK(rec.levels[i].h < rec.levels[i - 1].h);
        // Pre-asymptotic 4x4 level skews the lower orders more.
        const auto tail = std::vector<LevelRecord>(rec.levels.begin() + 1, rec.levels.end());
        const auto r = compute_rates(tail);
        CHECK(std::abs(r.l2 - r.l2_median) <= 0.15);
        CHECK(std::abs(r.h1 - r.h1_median) <= 0.15);
    }
}

TEST_CASE("level meshes")
{
    ExperimentConfig cfg;
    cfg.grid_n = 3;
    cfg.levels = 3;
    const auto g = level_meshes(cfg);
    REQUIRE(g.size() == 3);
    CHECK(g[2].num_faces() == 144);
    cfg.source = MeshSource::Hybrid;
    cfg.hybrid_n = 5;
    const auto h = level_meshes(cfg);
    REQUIRE(h.size() == 3);
    CHECK(h[1].num_faces() > h[0].num_faces());
}

TEST_CASE("conditioning without marked polygons matches the plain run")
{
    ExperimentConfig cfg;
    cfg.experiment = "conditioning";
    cfg.grid_n = 4;
    cfg.levels = 2;
    cfg.modes = {BasisMode::Q1, BasisMode::PolySpline};
    cfg.perturb_fraction = 0.0;
    const auto rows = run_conditioning(cfg);
    int pairs = 0;
    for (const auto& a : rows)
        for (const auto& b : rows)
            if (!a.perturbed && b.perturbed && a.level == b.level && a.mode == b.mode) {
                CHECK(b.polygons == 0);
                CHECK(a.cond == b.cond);
                ++pairs;
            }
    CHECK(pairs == 4);
}

TEST_CASE("interpolation resilience")
{
    const auto shapes = resilience_shapes(14, 42);
    REQUIRE(shapes.size() == 15);
    std::vector<ResilienceRow> rows;
    for (const auto& [name, mesh] : shapes)
        rows.push_back(resilience_case(mesh, 4, name));

    // Square: both bases reproduce quadratics, so both errors are small and comparable.
    const auto& sq = rows.front();
    CHECK(sq.ratio_l2 > 0.5);
    CHECK(sq.ratio_l2 < 2.0);
    CHECK(sq.q2_l2 < 0.05);
    CHECK(sq.poly_l2 < 0.05);

    double mean_linf = 0, mean_l2 = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        mean_linf += rows[i].ratio_linf;
        mean_l2 += rows[i].ratio_l2;
    }
    mean_linf /= double(rows.size() - 1);
    mean_l2 /= double(rows.size() - 1);
    MESSAGE("mean ratio Linf " << mean_linf << ", L2 " << mean_l2);
    CHECK(rows[1].ratio_linf > 1.0);
    CHECK(mean_linf >= 2.0);
    CHECK(mean_l2 > 1.0);
}

TEST_CASE("experiment outputs are deterministic")
{
    ExperimentConfig cfg;
    cfg.experiment = "conditioning";
    cfg.grid_n = 4;
    cfg.levels = 2;
    cfg.modes = {BasisMode::Q1, BasisMode::Q2};
    cfg.seed = 5;
    const auto a = scratch("a"), b = scratch("b");
    cfg.output = a.string();
    run_experiment(cfg);
    cfg.output = b.string();
    run_experiment(cfg);
    CHECK(slurp(a / "conditioning.csv") == slurp(b / "conditioning.csv"));
    CHECK(slurp(a / "conditioning.csv").rfind("# seed=5", 0) == 0);
    CHECK(fs::exists(a / "summary.json"));

    cfg.experiment = "resilience";
    cfg.resilience_shapes = 5;
    cfg.output = a.string();
    run_experiment(cfg);
    cfg.output = b.string();
    run_experiment(cfg);
    CHECK(slurp(a / "resilience.csv") == slurp(b / "resilience.csv"));

    cfg.experiment = "convergence";
    cfg.levels = 2;
    cfg.modes = {BasisMode::Q1};
    cfg.output = a.string();
    run_experiment(cfg);
    std::ifstream csv(a / "convergence_q1.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "level,h,N,L2,Linf,H1,t_basis,t_assembly,t_solve");
    fs::remove_all(a);
    fs::remove_all(b);
}
