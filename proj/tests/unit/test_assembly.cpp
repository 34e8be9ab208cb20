#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "polyspline/assembly.hpp"
#include "polyspline/discretization.hpp"
#include "polyspline/error.hpp"
#include "polyspline/experiments.hpp"
#include "polyspline/franke.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/quadrature.hpp"
#include "polyspline/solver.hpp"

using namespace polyspline;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

DiscretizationOptions with_mode(BasisMode mode)
{
    DiscretizationOptions o;
    o.mode = mode;
    return o;
}

PolyMesh sheared(const PolyMesh& m, double s)
{
    auto v = m.vertices();
    for (auto& p : v)
        p.x() += s * p.y();
    return PolyMesh(std::move(v), m.face_list());
}

Eigen::MatrixXd dense(const SparseMatrix& K) { return Eigen::MatrixXd(K); }

} // namespace

TEST_CASE("square and segment Gauss rules")
{
    const auto r1 = quad_rule_square(1);
    REQUIRE(r1.size() == 1);
    CHECK(r1.points[0].isApprox(Vec2(0.5, 0.5)));
    CHECK(r1.weights[0] == doctest::Approx(1.0));

    const auto r5 = quad_rule_square(5);
    double a = 0, b = 0;
    for (std::size_t q = 0; q < r5.size(); ++q) {
        const Vec2 p = r5.points[q];
        a += r5.weights[q] * p.x() * p.x() * p.y() * p.y();
        b += r5.weights[q] * std::pow(p.x(), 5);
    }
    CHECK(std::abs(a - 1.0 / 9) < 1e-15);
    CHECK(std::abs(b - 1.0 / 6) < 1e-15);

    for (int deg = 1; deg <= 11; ++deg) {
        const auto s = quad_rule_segment(deg);
        for (int k = 0; k <= deg; ++k) {
            double v = 0;
            for (std::size_t q = 0; q < s.size(); ++q)
                v += s.weights[q] * std::pow(s.points[q].x(), k);
            CHECK(std::abs(v - 1.0 / (k + 1)) < 1e-14);
        }
    }
}

TEST_CASE("triangle and polygon rules")
{
    // int_T x^a y^b over the reference triangle = a! b! / (a+b+2)!
    for (int deg = 1; deg <= 8; ++deg) {
        const auto t = quad_rule_triangle(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), deg);
        for (int i = 0; i <= deg; ++i)
            for (int j = 0; i + j <= deg; ++j) {
                double v = 0;
                for (std::size_t q = 0; q < t.size(); ++q)
                    v += t.weights[q] * std::pow(t.points[q].x(), i) * std::pow(t.points[q].y(), j);
                CHECK(std::abs(v - factorial(i) * factorial(j) / factorial(i + j + 2)) < 1e-15);
            }
    }

    const std::vector<Vec2> sq{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    const auto ps = quad_rule_polygon(sq, Vec2(0.5, 0.5), 6);
    double w = 0, x = 0;
    for (std::size_t q = 0; q < ps.size(); ++q) {
        w += ps.weights[q];
        x += ps.weights[q] * ps.points[q].x();
    }
    CHECK(std::abs(w - 1.0) < 1e-14);
    CHECK(std::abs(x - 0.5) < 1e-14);

    // L = [0,2]x[0,1] + [0,1]x[1,2]: int x^2 y = 4/3 + 1/2
    const std::vector<Vec2> L{Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(1, 1), Vec2(1, 2), Vec2(0, 2)};
    const auto pl = quad_rule_polygon(L, Vec2(0.5, 0.5), 6);
    double v = 0, area = 0;
    for (std::size_t q = 0; q < pl.size(); ++q) {
        const Vec2 p = pl.points[q];
        v += pl.weights[q] * p.x() * p.x() * p.y();
        area += pl.weights[q];
    }
    CHECK(std::abs(v - 11.0 / 6) < 1e-13);
    CHECK(std::abs(area - 3.0) < 1e-13);

    try {
        quad_rule_polygon(L, Vec2(1.8, 0.5), 6);
        FAIL("expected NotStarShaped");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotStarShaped);
    }
}

TEST_CASE("Q1 element stiffness on the unit square")
{
    const Discretization d(regular_grid(1, 1), with_mode(BasisMode::Q1));
    const auto ev = d.element_values(0);
    const auto Ke = element_stiffness(ev, Pde::poisson());
    REQUIRE(Ke.rows() == 4);
    // Closed form: 2/3 on the diagonal, -1/6 along edges, -1/3 across.
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const Vec2 pa = d.bases().table[ev.dofs[a]].anchor, pb = d.bases().table[ev.dofs[b]].anchor;
            const double dist = (pa - pb).squaredNorm();
            const double expect = dist == 0 ? 2.0 / 3 : (dist == 1 ? -1.0 / 6 : -1.0 / 3);
            CHECK(Ke(a, b) == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("global stiffness is symmetric and annihilates constants")
{
    const Discretization d(hybrid_cross_mesh(7), DiscretizationOptions{});
    const auto K = assemble_stiffness(d);
    const auto Kd = dense(K);
    CHECK((Kd - Kd.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Kd.cwiseAbs().maxCoeff());
    const Eigen::VectorXd row = Kd * Eigen::VectorXd::Ones(Kd.cols());
    CHECK(row.cwiseAbs().maxCoeff() <= 1e-10 * Kd.cwiseAbs().maxCoeff());

    const auto M = assemble_mass(d);
    CHECK(Eigen::VectorXd::Ones(M.rows()).dot(M * Eigen::VectorXd::Ones(M.cols())) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("right-hand side")
{
    const Discretization d(hybrid_cross_mesh(7), DiscretizationOptions{});
    CHECK(assemble_rhs(d, [](const Vec2&) { return Vec2::Zero(); }).norm() == 0.0);
    CHECK(assemble_rhs(d, [](const Vec2&) { return Vec2(1, 0); }).sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Dirichlet fit")
{
    SUBCASE("zero data")
    {
        const Discretization d(hybrid_cross_mesh(7), DiscretizationOptions{});
        const auto fit = fit_dirichlet(d, [](const Vec2&) { return Vec2::Zero(); });
        CHECK_FALSE(fit.dofs.empty());
        CHECK(fit.values.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("quadratic data on a Q2 mesh is interpolated")
    {
        const Discretization d(parallelogram_grid(4, 0.2), with_mode(BasisMode::Q2));
        auto q = [](const Vec2& x) { return Vec2(1 + x.x() * x.y() - 2 * x.y() * x.y() + 0.5 * x.x(), 0); };
        const auto fit = fit_dirichlet(d, q);
        CHECK(fit.dofs.size() == 16 * 2);
        for (std::size_t i = 0; i < fit.dofs.size(); ++i)
            CHECK(fit.values(i) == doctest::Approx(q(d.bases().table[fit.dofs[i]].anchor).x()).epsilon(1e-12));
        CHECK(fit.max_sample_misfit < 1e-12);
    }
    SUBCASE("Franke trace error converges on spline boundaries")
    {
        std::vector<double> h, err;
        for (int n : {4, 8, 16, 32}) {
            const Discretization d(regular_grid(n, n), DiscretizationOptions{});
            const auto data = [](const Vec2& x) { return Vec2(franke(x), 0); };
            const auto fit = fit_dirichlet(d, data);
            Eigen::VectorXd u = Eigen::VectorXd::Zero(d.num_dofs());
            for (std::size_t i = 0; i < fit.dofs.size(); ++i)
                u(fit.dofs[i]) = fit.values(i);
            h.push_back(1.0 / n);
            err.push_back(dirichlet_trace_error(d, u, data));
        }
        CHECK(fitted_rate(h, err) >= 2.5);
    }
}

TEST_CASE("Neumann loads")
{
    const Discretization d(regular_grid(4, 4, Vec2(0, 0), Vec2(4, 4)), DiscretizationOptions{});
    Eigen::VectorXd f = Eigen::VectorXd::Zero(d.num_dofs());
    apply_neumann(d, [](const Vec2&) { return Vec2::Zero(); }, {}, f);
    CHECK(f.norm() == 0.0);
    const auto one_edge = [](const Vec2& mid) { return mid.y() < 1e-12 && mid.x() < 1.0; };
    apply_neumann(d, [](const Vec2&) { return Vec2(1, 0); }, one_edge, f);
    CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mixed boundary conditions keep the convergence rate")
{
    auto dirichlet = franke_poisson_problem();
    auto mixed = dirichlet;
    mixed.is_neumann = [](const Vec2& mid) { return mid.x() > 1 - 1e-12; };
    mixed.neumann = [](const Vec2& x) { return Vec2(franke_gradient(x).x(), 0); };
    std::vector<double> h, e_d, e_m;
    for (int n : {8, 16, 32}) {
        const Discretization d(regular_grid(n, n), DiscretizationOptions{});
        h.push_back(1.0 / n);
        e_d.push_back(run_pipeline(d, dirichlet).norms.l2);
        e_m.push_back(run_pipeline(d, mixed).norms.l2);
    }
    CHECK(std::abs(fitted_rate(h, e_m) - fitted_rate(h, e_d)) < 0.3);
}

TEST_CASE("solvers")
{
    SUBCASE("identity")
    {
        SparseMatrix I(7, 7);
        I.setIdentity();
        const Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(7, 1, 7);
        for (auto k : {SolverKind::Dense, SolverKind::SparseCholesky, SolverKind::ConjugateGradient})
            CHECK((solve(I, f, k) - f).norm() < 1e-14);
    }
    SUBCASE("random SPD")
    {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> N;
        Eigen::MatrixXd A(50, 50);
        for (int i = 0; i < A.size(); ++i)
            A.data()[i] = N(rng);
        const Eigen::MatrixXd S = A * A.transpose() + 50 * Eigen::MatrixXd::Identity(50, 50);
        const SparseMatrix K = S.sparseView();
        Eigen::VectorXd f(50);
        for (int i = 0; i < 50; ++i)
            f(i) = N(rng);
        for (auto k : {SolverKind::Auto, SolverKind::Dense, SolverKind::SparseCholesky, SolverKind::ConjugateGradient}) {
            SolveStats st;
            const auto u = solve(K, f, k, &st);
            CHECK((K * u - f).norm() / f.norm() <= 1e-10);
        }
        CHECK(solver_from_string("cg") == SolverKind::ConjugateGradient);
        CHECK_THROWS_AS(solver_from_string("magic"), Error);
    }
    SUBCASE("not SPD")
    {
        SparseMatrix K(2, 2);
        K.insert(0, 0) = 1;
        K.insert(1, 1) = -1;
        try {
            solve(K, Eigen::VectorXd::Ones(2), SolverKind::SparseCholesky);
            FAIL("expected NotSPD");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotSPD);
        }
    }
    SUBCASE("Q1 Poisson matches a dense oracle")
    {
        const Discretization d(regular_grid(8, 8), with_mode(BasisMode::Q1));
        const auto pr = franke_poisson_problem();
        const auto K = assemble_stiffness(d);
        const auto f = assemble_rhs(d, pr.source);
        const auto sys = apply_dirichlet(K, f, fit_dirichlet(d, pr.dirichlet));
        const Eigen::VectorXd ref = dense(sys.K_free).fullPivLu().solve(sys.f_free);
        for (auto k : {SolverKind::Dense, SolverKind::SparseCholesky, SolverKind::ConjugateGradient})
            CHECK((solve(sys.K_free, sys.f_free, k) - ref).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("error norms")
{
    const Discretization d(regular_grid(4, 4), with_mode(BasisMode::Q2));
    auto q = [](const Vec2& x) { return Vec2(x.x() * x.x() - x.x() * x.y() + 0.3, 0); };
    auto gq = [](const Vec2& x) {
        Mat2 g = Mat2::Zero();
        g.row(0) << 2 * x.x() - x.y(), -x.x();
        return g;
    };
    const Eigen::VectorXd u = fit_field(d, q);
    const auto e0 = error_norms(d, u, q, gq);
    CHECK(e0.l2 < 1e-12);
    CHECK(e0.linf < 1e-12);
    CHECK(e0.h1 < 1e-11);

    const double c = 0.25;
    const auto e1 = error_norms(d, u + c * Eigen::VectorXd::Ones(u.size()), q, gq);
    CHECK(e1.l2 == doctest::Approx(c).epsilon(1e-12));
    CHECK(e1.linf == doctest::Approx(c).epsilon(1e-12));
    CHECK(e1.h1_semi < 1e-11);

    // error field a x + b y on the unit square
    const double a = 0.5, b = -2.0;
    const Eigen::VectorXd ul = fit_field(d, [&](const Vec2& x) { return Vec2(q(x).x() + a * x.x() + b * x.y(), 0); });
    const auto e2 = error_norms(d, ul, q, gq);
    const double l2sq = a * a / 3 + b * b / 3 + a * b / 2;
    CHECK(e2.h1_semi == doctest::Approx(std::hypot(a, b)).epsilon(1e-10));
    CHECK(e2.l2 == doctest::Approx(std::sqrt(l2sq)).epsilon(1e-10));
    CHECK(e2.h1 == doctest::Approx(std::sqrt(l2sq + a * a + b * b)).epsilon(1e-10));
    // |a x + b y| peaks at a corner of the square
    const double peak = std::max({std::abs(a), std::abs(b), std::abs(a + b)});
    CHECK(e2.linf == doctest::Approx(peak).epsilon(1e-10));
}

TEST_CASE("condition numbers")
{
    SparseMatrix D(10, 10);
    for (int i = 0; i < 10; ++i)
        D.insert(i, i) = i + 1;
    CHECK(condition_number(D) == doctest::Approx(10.0).epsilon(1e-12));
    SparseMatrix I(5, 5);
    I.setIdentity();
    CHECK(condition_number(I) == doctest::Approx(1.0).epsilon(1e-14));
    SparseMatrix big(3001, 3001);
    big.setIdentity();
    try {
        condition_number(big);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooLarge);
    }

    std::vector<double> h, kappa;
    for (int n : {4, 8, 16, 32}) {
        const Discretization d(regular_grid(n, n), with_mode(BasisMode::Q1));
        const auto K = assemble_stiffness(d);
        const auto sys = apply_dirichlet(K, Eigen::VectorXd::Zero(K.rows()),
                                         fit_dirichlet(d, [](const Vec2&) { return Vec2::Zero(); }));
        h.push_back(1.0 / n);
        kappa.push_back(condition_number(sys.K_free));
    }
    CHECK(-fitted_rate(h, kappa) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("patch test on a sheared hybrid mesh")
{
    const auto mesh = sheared(hybrid_cross_mesh(7), 0.3);
    const Discretization d(mesh, DiscretizationOptions{});
    CHECK(d.classes().count(CellTag::SplineCompatible) > 0);
    CHECK(d.classes().count(CellTag::Q2Quad) > 0);
    CHECK(d.classes().count(CellTag::Polygon) == 1);

    ProblemSpec p;
    p.exact = [](const Vec2& x) { return Vec2(x.x() * x.x() + x.x() * x.y() - x.y() * x.y() + x.x() + 2, 0); };
    p.exact_gradient = [](const Vec2& x) {
        Mat2 g = Mat2::Zero();
        g.row(0) << 2 * x.x() + x.y() + 1, x.x() - 2 * x.y();
        return g;
    };
    p.dirichlet = p.exact;
    p.source = [](const Vec2&) { return Vec2::Zero(); };
    const auto r = run_pipeline(d, p);
    CHECK(r.norms.linf <= 1e-7);
    CHECK(r.relative_residual <= 1e-9);
}

TEST_CASE("stiffness is insensitive to extra quadrature on affine cells")
{
    auto opt = DiscretizationOptions{};
    const auto mesh = parallelogram_grid(5, 0.25);
    const auto K6 = dense(assemble_stiffness(Discretization(mesh, opt)));
    opt.quad_degree = 8;
    const auto K8 = dense(assemble_stiffness(Discretization(mesh, opt)));
    CHECK((K6 - K8).cwiseAbs().maxCoeff() <= 1e-10 * K6.cwiseAbs().maxCoeff());
}

TEST_CASE("rigid motions lie in the kernel of the elasticity matrix")
{
    DiscretizationOptions opt;
    opt.pde = Pde::elasticity(200, 0.35);
    for (const auto& mesh : {regular_grid(5, 5), hybrid_cross_mesh(7)}) {
        const Discretization d(mesh, opt);
        const auto K = assemble_stiffness(d);
        const double knorm = dense(K).cwiseAbs().rowwise().sum().maxCoeff();
        const std::array<FieldFn, 3> modes{[](const Vec2&) { return Vec2(1, 0); }, [](const Vec2&) { return Vec2(0, 1); },
                                           [](const Vec2& x) { return Vec2(-x.y(), x.x()); }};
        for (const auto& m : modes) {
            const Eigen::VectorXd r = fit_field(d, m);
            CHECK((K * r).cwiseAbs().maxCoeff() <= 1e-9 * knorm * r.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("coordinate dump")
{
    SparseMatrix K(2, 2);
    K.insert(0, 0) = 2;
    K.insert(1, 0) = -1;
    const auto path = std::filesystem::temp_directory_path() / "polyspline_coo.txt";
    write_coordinate(K, path.string());
    std::ifstream in(path);
    int i, j;
    double v;
    int lines = 0;
    while (in >> i >> j >> v) {
        CHECK(v == (i == 0 ? 2.0 : -1.0));
        ++lines;
    }
    CHECK(lines == 2);
    std::filesystem::remove(path);
}
