#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "polyspline/classify.hpp"
#include "polyspline/error.hpp"
#include "polyspline/generators.hpp"
#include "polyspline/geometry.hpp"
#include "polyspline/mesh.hpp"
#include "polyspline/mesh_io.hpp"

using namespace polyspline;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::Io;
}

// Five quads fanned around one vertex of valence 5.
PolyMesh valence5_fan()
{
    std::vector<Vec2> v{Vec2(0, 0)};
    for (int k = 0; k < 5; ++k) {
        const double a = 2 * std::numbers::pi * k / 5;
        const double b = a + std::numbers::pi / 5;
        v.emplace_back(std::cos(a), std::sin(a));
        v.emplace_back(1.6 * std::cos(b), 1.6 * std::sin(b));
    }
    std::vector<std::vector<int>> f;
    for (int k = 0; k < 5; ++k)
        f.push_back({0, 1 + 2 * k, 2 + 2 * k, 1 + 2 * ((k + 1) % 5)});
    return PolyMesh(v, f);
}

} // namespace

TEST_CASE("single quad has only boundary edges")
{
    const auto m = regular_grid(1, 1);
    CHECK(m.num_edges() == 4);
    CHECK(m.num_boundary_edges() == 4);
    CHECK(m.num_interior_edges() == 0);
    for (int h = 0; h < 4; ++h)
        CHECK(m.twin(h) < 0);
}

TEST_CASE("2x2 grid edge counts and twin links")
{
    const auto m = regular_grid(2, 2);
    CHECK(m.num_interior_edges() == 4);
    CHECK(m.num_boundary_edges() == 8);
    for (int h = 0; h < m.num_halfedges(); ++h) {
        CHECK(m.next(m.prev(h)) == h);
        const int t = m.twin(h);
        if (t >= 0) {
            CHECK(m.twin(t) == h);
            CHECK(m.from(t) == m.to(h));
            CHECK(m.to(t) == m.from(h));
        }
    }
    // Euler characteristic of a disk.
    CHECK(m.num_vertices() - m.num_edges() + m.num_faces() == 1);
    CHECK(m.valence(4) == 4);
    CHECK(m.is_boundary_vertex(0));
    CHECK_FALSE(m.is_boundary_vertex(4));
}

TEST_CASE("build_adjacency rejects defects")
{
    const std::vector<Vec2> v{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1), Vec2(1, -1)};
    SUBCASE("same traversal direction")
    {
        CHECK(code_of([&] { build_adjacency(v, {{0, 1, 2}, {0, 1, 3}}); }) == ErrorCode::InconsistentOrientation);
    }
    SUBCASE("clockwise face")
    {
        CHECK(code_of([&] { build_adjacency(v, {{0, 2, 1}}); }) == ErrorCode::InconsistentOrientation);
    }
    SUBCASE("three faces on one edge")
    {
        CHECK(code_of([&] { build_adjacency(v, {{0, 1, 2}, {1, 0, 4}, {0, 1, 3}}); }) == ErrorCode::NonManifoldEdge);
    }
    SUBCASE("index out of range")
    {
        CHECK(code_of([&] { build_adjacency(v, {{0, 1, 7}}); }) == ErrorCode::InvalidMesh);
    }
    SUBCASE("repeated vertex")
    {
        CHECK(code_of([&] { build_adjacency(v, {{0, 1, 1, 2}}); }) == ErrorCode::InvalidMesh);
    }
}

TEST_CASE("poly-off round trip keeps geometry and skips comments")
{
    const auto m = hybrid_cross_mesh(7);
    std::stringstream ss;
    write_polyoff(ss, m);
    const auto r = read_polyoff(ss);
    REQUIRE(r.num_vertices() == m.num_vertices());
    REQUIRE(r.num_faces() == m.num_faces());
    for (int i = 0; i < m.num_vertices(); ++i)
        CHECK((r.vertex(i) - m.vertex(i)).norm() == 0.0);
    CHECK(r.face_list() == m.face_list());

    std::istringstream in("# header\n4 1\n0 0\n# inline\n1 0\n1 1\n0 1\n4 0 1 2 3\n");
    const auto q = read_polyoff(in);
    CHECK(q.num_faces() == 1);
    CHECK(q.total_area() == doctest::Approx(1.0));

    std::istringstream bad("3 1\n0 0\n1 0\n");
    CHECK(code_of([&] { read_polyoff(bad); }) == ErrorCode::Io);
}

TEST_CASE("spline compatibility on regular grids")
{
    const auto g3 = regular_grid(3, 3);
    CHECK(is_spline_compatible(g3, 4));
    CHECK(is_spline_compatible(g3, 0)); // corner, cut on two sides
    const auto st = spline_stencil(g3, 0);
    REQUIRE(st);
    CHECK(st->side_face[0] == -1);
    CHECK(st->side_face[3] == -1);
    CHECK(st->side_face[1] == 1);
    CHECK(st->side_face[2] == 3);
    CHECK(st->corner_face[2] == 4);

    // Independent rule: on a structured grid every cell's one-ring is a
    // (possibly cut) 3x3 block of quads with valence-4 interior vertices.
    const auto g5 = regular_grid(5, 5);
    const auto cc = classify_cells(g5);
    CHECK(cc.count(CellTag::SplineCompatible) == 25);
    CHECK(cc.count(CellTag::Q2Quad) == 0);

    const auto strip = regular_grid(3, 1);
    CHECK(classify_cells(strip).count(CellTag::SplineCompatible) == 3);
}

TEST_CASE("valence-5 corner is not spline compatible")
{
    const auto m = valence5_fan();
    for (int f = 0; f < m.num_faces(); ++f)
        CHECK_FALSE(is_spline_compatible(m, f));
    CHECK(classify_cells(m).count(CellTag::Q2Quad) == 5);
}

TEST_CASE("polygon neighborhood is forced to Q2")
{
    const auto m = hybrid_cross_mesh(7);
    const auto cc = classify_cells(m);
    const auto polys = cc.cells(CellTag::Polygon);
    REQUIRE(polys.size() == 1);
    const int p = polys[0];
    CHECK(m.arity(p) == 12);
    for (int g : m.vertex_neighbors(p))
        CHECK(cc[g] == CellTag::Q2Quad);
    CHECK(cc.count(CellTag::SplineCompatible) > 0);

    for (int f = 0; f < m.num_faces(); ++f) {
        if (cc[f] != CellTag::SplineCompatible)
            continue;
        for (int g : m.vertex_neighbors(f))
            CHECK(cc[g] != CellTag::Polygon);
    }
    for (int k = 0; k < m.arity(p); ++k) {
        const int t = m.twin(m.halfedge(p, k));
        REQUIRE(t >= 0);
        CHECK(cc[m.face_of(t)] == CellTag::Q2Quad);
    }
    CHECK(classify_cells(m).tags == cc.tags);
}

TEST_CASE("classification enforces separation")
{
    const auto g = regular_grid(5, 5);
    const int adjacent[2] = {12, 13};
    CHECK(code_of([&] { classify_cells(g, adjacent); }) == ErrorCode::SeparationViolated);
    const int corner_touch[2] = {6, 12};
    CHECK(code_of([&] { classify_cells(g, corner_touch); }) == ErrorCode::SeparationViolated);
    const int boundary[1] = {0};
    CHECK(code_of([&] { classify_cells(g, boundary); }) == ErrorCode::SeparationViolated);
    const int apart[2] = {6, 18};
    const auto cc = classify_cells(g, apart);
    CHECK(cc.count(CellTag::Polygon) == 2);
    // Only the two off-diagonal 2x2 corners escape both vertex neighborhoods.
    CHECK(cc.count(CellTag::SplineCompatible) == 8);
    for (int f : {3, 4, 8, 9, 15, 16, 20, 21})
        CHECK(cc[f] == CellTag::SplineCompatible);
}

TEST_CASE("geometry helpers")
{
    const std::vector<Vec2> sq{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
    CHECK(geometry::signed_area(sq) == doctest::Approx(1.0));
    CHECK(geometry::area_centroid(sq).isApprox(Vec2(0.5, 0.5)));
    CHECK(geometry::point_in_polygon(sq, Vec2(0.5, 0.5)));
    CHECK_FALSE(geometry::point_in_polygon(sq, Vec2(1.0, 0.5)));
    CHECK(geometry::segments_cross(Vec2(0, 0), Vec2(1, 1), Vec2(0, 1), Vec2(1, 0)));
    CHECK_FALSE(geometry::segments_cross(Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(2, 1)));
}
