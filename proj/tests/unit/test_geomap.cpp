#include <doctest.h>

#include <random>

#include "polyspline/bases.hpp"
#include "polyspline/classify.hpp"
#include "polyspline/discretization.hpp"
#include "polyspline/error.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/geomap.hpp"
#include "polyspline/quadrature.hpp"

using namespace polyspline;

namespace {

GeoMap fitted(const PolyMesh& m, const CellClass& cc)
{
    const auto bs = build_bases(m, cc, 2);
    return fit_geometric_map(m, cc, bs);
}

} // namespace

TEST_CASE("spline fit reproduces the identity on a unit grid")
{
    const auto m = regular_grid(6, 6);
    const auto cc = classify_cells(m);
    const auto g = fitted(m, cc);
    const double h = 1.0 / 6;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0, 1);
    for (int f = 0; f < m.num_faces(); ++f) {
        CHECK(g.kind(f) == MapKind::Spline);
        const Vec2 lo = m.vertex(m.face(f)[0]);
        for (int k = 0; k < 3; ++k) {
            const Vec2 p(U(rng), U(rng));
            CHECK((g.map(f, p) - (lo + h * p)).norm() < 1e-10);
            const auto ev = g.eval(f, p);
            CHECK((ev.jac - h * Mat2::Identity()).norm() < 1e-10);
            CHECK(ev.det == doctest::Approx(h * h).epsilon(1e-10));
            CHECK((ev.metric - Mat2::Identity() / (h * h)).norm() < 1e-6);
        }
    }
    const auto rep = validate_geomap(m, g, quad_rule_square(6));
    CHECK(rep.flagged.empty());
    CHECK(rep.min_det == doctest::Approx(h * h).epsilon(1e-10));
}

TEST_CASE("bilinear quad")
{
    const PolyMesh m({Vec2(0, 0), Vec2(2, 0), Vec2(2, 1), Vec2(0, 1)}, {{0, 1, 2, 3}});
    const auto g = GeoMap::bilinear(m);
    CHECK(g.kind(0) == MapKind::Lagrange);
    CHECK((g.map(0, Vec2(0.5, 0.5)) - Vec2(1, 0.5)).norm() < 1e-15);

    const PolyMesh t({Vec2(0, 0), Vec2(2, 0.3), Vec2(2.4, 1.7), Vec2(-0.2, 1.1)}, {{0, 1, 2, 3}});
    const auto gt = GeoMap::bilinear(t);
    const double h = 1e-6;
    for (const Vec2 p : {Vec2(0.5, 0.5), Vec2(0.2, 0.9)}) {
        Mat2 fd;
        fd.col(0) = (gt.map(0, p + Vec2(h, 0)) - gt.map(0, p - Vec2(h, 0))) / (2 * h);
        fd.col(1) = (gt.map(0, p + Vec2(0, h)) - gt.map(0, p - Vec2(0, h))) / (2 * h);
        CHECK((gt.jacobian(0, p) - fd).norm() < 1e-8);
        const auto ev = gt.eval(0, p);
        CHECK(ev.det == doctest::Approx(fd.determinant()).epsilon(1e-8));
        CHECK((ev.metric - (fd.transpose() * fd).inverse()).norm() < 1e-7);
        // SPD metric
        Eigen::SelfAdjointEigenSolver<Mat2> es(ev.metric);
        CHECK(es.eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("affine grids have constant metric")
{
    const auto m = parallelogram_grid(4, 0.4);
    const auto g = fitted(m, classify_cells(m));
    Mat2 J;
    J << 0.25, 0.4 * 0.25, 0, 0.25; // columns: images of the unit steps
    const Mat2 A = (J.transpose() * J).inverse();
    for (int f = 0; f < m.num_faces(); ++f)
        for (const Vec2 p : {Vec2(0.1, 0.2), Vec2(0.7, 0.9)}) {
            const auto ev = g.eval(f, p);
            CHECK((ev.jac - J).norm() < 1e-10);
            CHECK((ev.metric - A).norm() < 1e-8);
        }
}

TEST_CASE("scaling and identity cells")
{
    const double s = 0.1;
    const auto m = regular_grid(4, 4, Vec2(0, 0), Vec2(4 * s, 4 * s));
    const auto g = GeoMap::bilinear(m);
    const auto ev = g.eval(5, Vec2(0.3, 0.3));
    CHECK(ev.abs_det() == doctest::Approx(s * s));
    CHECK((ev.metric - Mat2::Identity() / (s * s)).norm() < 1e-9);

    const auto h = hybrid_cross_mesh(7);
    const auto gh = GeoMap::bilinear(h);
    for (int f = 0; f < h.num_faces(); ++f)
        if (!h.is_quad(f)) {
            CHECK(gh.kind(f) == MapKind::Identity);
            const auto e = gh.eval(f, Vec2(0.4, 0.4));
            CHECK((e.jac - Mat2::Identity()).norm() == 0.0);
            CHECK(e.abs_det() == 1.0);
            CHECK((e.metric - Mat2::Identity()).norm() == 0.0);
        }
}

TEST_CASE("validation flags an inverted quad")
{
    // The last vertex is pulled across the diagonal: a dart-shaped quad whose
    // bilinear map folds near one corner.
    const PolyMesh m({Vec2(0, 0), Vec2(1, 0), Vec2(0.2, 0.2), Vec2(0, 1)}, {{0, 1, 2, 3}});
    const auto g = GeoMap::bilinear(m);
    // Sign oracle: det at a corner equals the cross product of its edges.
    const Vec2 a = m.vertex(2) - m.vertex(3), b = m.vertex(2) - m.vertex(1);
    const double corner_det = a.x() * b.y() - a.y() * b.x();
    CHECK(corner_det < 0.0);
    CHECK(g.jacobian(0, Vec2(1, 1)).determinant() == doctest::Approx(corner_det));
    const auto rep = validate_geomap(m, g, quad_rule_square(6));
    REQUIRE(rep.flagged.size() == 1);
    CHECK(rep.min_det < 0.0);

    const PolyMesh ok({Vec2(0, 0), Vec2(1, 0), Vec2(1.2, 0.9), Vec2(0, 1)}, {{0, 1, 2, 3}});
    CHECK(validate_geomap(ok, GeoMap::bilinear(ok), quad_rule_square(6)).flagged.empty());

    // det Dg is affine along the diagonal: it vanishes at t = 1 / (1 - det(1,1)).
    const double t0 = 1.0 / (1.0 - corner_det);
    try {
        g.eval(0, Vec2(t0, t0));
        FAIL("expected DegenerateJacobian");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateJacobian);
    }
}

TEST_CASE("polygon edges are watertight")
{
    const Discretization d(hybrid_cross_mesh(7), DiscretizationOptions{});
    const auto& m = d.mesh();
    int checked = 0;
    for (const auto& pb : d.polygon_bases()) {
        const int n = m.arity(pb.cell);
        for (int k = 0; k < n; ++k) {
            const int h = m.halfedge(pb.cell, k);
            const int t = m.twin(h);
            REQUIRE(t >= 0);
            const int q = m.face_of(t);
            const Vec2 a = m.vertex(m.from(h)), b = m.vertex(m.to(h));
            for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
                // the twin runs from b to a
                const Vec2 x = d.map(q, quad_side_point(m.local_index(t), s));
                CHECK((x - (b + s * (a - b))).norm() < 1e-10);
                ++checked;
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("Q2 reproduces physical quadratics on affine cells")
{
    DiscretizationOptions opt;
    opt.mode = BasisMode::Q2;
    const Discretization d(parallelogram_grid(3, 0.3), opt);
    auto q = [](const Vec2& x) { return 1 + x.x() - 2 * x.y() + 3 * x.x() * x.y() + x.x() * x.x() - 0.5 * x.y() * x.y(); };
    // Nodal interpolation: Q2 dofs sit at their anchors.
    Eigen::VectorXd u(d.num_scalar_dofs());
    for (int j = 0; j < u.size(); ++j)
        u(j) = q(d.bases().table[j].anchor);
    for (int f = 0; f < d.mesh().num_faces(); ++f) {
        const std::vector<Vec2> p{Vec2(0.13, 0.71), Vec2(0.5, 0.5), Vec2(0.9, 0.2)};
        const auto ev = d.evaluate(f, p);
        for (std::size_t k = 0; k < p.size(); ++k) {
            double s = 0.0;
            for (std::size_t a = 0; a < ev.dofs.size(); ++a)
                s += ev.values(k, a) * u(ev.dofs[a]);
            CHECK(s == doctest::Approx(q(ev.points[k])).epsilon(1e-12));
        }
    }
}
