#include "polyspline/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "polyspline/error.hpp"
#include "polyspline/geometry.hpp"

namespace polyspline {

namespace geo = geometry;

StarShapeInfo polygon_kernel(std::span<const Vec2> polygon)
{
    StarShapeInfo info;
    const std::size_t n = polygon.size();
    if (n < 3)
        return info;
    Vec2 lo = polygon[0], hi = polygon[0];
    for (const auto& p : polygon) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = std::max((hi - lo).maxCoeff(), 1e-300);
    const double eps = 1e-12 * scale;
    lo.array() -= scale;
    hi.array() += scale;
    std::vector<Vec2> k{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    for (std::size_t i = 0; i < n && k.size() >= 3; ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % n];
        if ((b - a).norm() <= eps)
            continue;
        k = geo::clip_left_of(k, a, b, eps);
    }
    if (k.size() < 3 || geo::signed_area(k) <= 1e-12 * scale * scale)
        return info;
    info.kernel = std::move(k);
    info.center = geo::area_centroid(info.kernel);
    info.empty = false;
    return info;
}

bool is_star_shaped(std::span<const Vec2> polygon) { return !polygon_kernel(polygon).empty; }

PolyMesh compact_mesh(const std::vector<Vec2>& vertices, const std::vector<std::vector<int>>& faces)
{
    std::vector<int> remap(vertices.size(), -1);
    std::vector<Vec2> verts;
    auto out = faces;
    for (auto& loop : out)
        for (int& v : loop) {
            if (remap[v] < 0) {
                remap[v] = int(verts.size());
                verts.push_back(vertices[v]);
            }
            v = remap[v];
        }
    return PolyMesh(std::move(verts), out);
}

namespace {

// Boundary loop of a set of faces, as vertex ids. Empty when the union is not
// a disk.
std::vector<int> union_loop(const PolyMesh& m, const std::vector<char>& in_set)
{
    std::map<int, int> next_of;
    int start = -1;
    for (int f = 0; f < m.num_faces(); ++f) {
        if (!in_set[f])
            continue;
        for (int k = 0; k < m.arity(f); ++k) {
            const int h = m.halfedge(f, k);
            const int t = m.twin(h);
            if (t >= 0 && in_set[m.face_of(t)])
                continue;
            if (!next_of.emplace(m.from(h), m.to(h)).second)
                return {};
            start = m.from(h);
        }
    }
    if (start < 0)
        return {};
    std::vector<int> loop;
    int v = start;
    do {
        loop.push_back(v);
        auto it = next_of.find(v);
        if (it == next_of.end() || loop.size() > next_of.size())
            return {};
        v = it->second;
    } while (v != start);
    if (loop.size() != next_of.size())
        return {};
    return loop;
}

std::vector<int> loop_of_triangles(const std::vector<std::array<int, 3>>& tris, const std::vector<int>& group)
{
    std::map<std::pair<int, int>, int> count;
    for (int t : group)
        for (int k = 0; k < 3; ++k)
            ++count[{tris[t][k], tris[t][(k + 1) % 3]}];
    std::map<int, int> next_of;
    int start = -1;
    for (const auto& [e, c] : count) {
        if (count.count({e.second, e.first}))
            continue;
        if (!next_of.emplace(e.first, e.second).second)
            return {};
        start = e.first;
    }
    std::vector<int> loop;
    int v = start;
    do {
        loop.push_back(v);
        auto it = next_of.find(v);
        if (it == next_of.end() || loop.size() > next_of.size())
            return {};
        v = it->second;
    } while (v != start);
    if (loop.size() != next_of.size())
        return {};
    return loop;
}

std::vector<Vec2> points_of(const std::vector<Vec2>& verts, const std::vector<int>& loop)
{
    std::vector<Vec2> p;
    p.reserve(loop.size());
    for (int v : loop)
        p.push_back(verts[v]);
    return p;
}

} // namespace

PolyMesh merge_faces(const PolyMesh& mesh, std::span<const int> faces)
{
    std::vector<char> in_set(mesh.num_faces(), 0);
    for (int f : faces)
        in_set.at(f) = 1;
    auto loop = union_loop(mesh, in_set);
    if (loop.size() < 3)
        throw Error(ErrorCode::MergeFailed, "union of " + std::to_string(faces.size()) + " faces is not a disk");
    std::vector<std::vector<int>> out;
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (!in_set[f])
            out.emplace_back(mesh.face(f).begin(), mesh.face(f).end());
    out.push_back(std::move(loop));
    return compact_mesh(mesh.vertices(), out);
}

std::vector<std::array<int, 3>> triangulate_polygon(std::span<const Vec2> polygon)
{
    std::vector<int> idx(polygon.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::array<int, 3>> tris;
    const double scale = std::max(geo::diameter(polygon), 1e-300);
    const double eps = 1e-12 * scale * scale;
    while (idx.size() > 3) {
        const std::size_t n = idx.size();
        int best = -1;
        double best_area = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const int a = idx[(i + n - 1) % n], b = idx[i], c = idx[(i + 1) % n];
            const double o = geo::orient(polygon[a], polygon[b], polygon[c]);
            if (o <= eps)
                continue;
            bool blocked = false;
            for (std::size_t j = 0; j < n && !blocked; ++j) {
                const int q = idx[j];
                if (q == a || q == b || q == c)
                    continue;
                const Vec2& p = polygon[q];
                blocked = geo::orient(polygon[a], polygon[b], p) >= -eps && geo::orient(polygon[b], polygon[c], p) >= -eps &&
                          geo::orient(polygon[c], polygon[a], p) >= -eps;
            }
            // prefer fat ears for better-shaped pieces
            if (!blocked && o > best_area) {
                best_area = o;
                best = int(i);
            }
        }
        if (best < 0) {
            // only collinear remainders left: drop the flattest vertex
            std::size_t flat = 0;
            double f_best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const double o = std::abs(geo::orient(polygon[idx[(i + n - 1) % n]], polygon[idx[i]], polygon[idx[(i + 1) % n]]));
                if (o < f_best) {
                    f_best = o;
                    flat = i;
                }
            }
            best = int(flat);
        }
        const std::size_t i = std::size_t(best);
        tris.push_back({idx[(i + n - 1) % n], idx[i], idx[(i + 1) % n]});
        idx.erase(idx.begin() + best);
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

namespace {

// Triangulates face f and regroups triangles greedily into star-shaped faces.
std::vector<std::vector<int>> star_pieces(const PolyMesh& m, int f)
{
    const auto loop = std::vector<int>(m.face(f).begin(), m.face(f).end());
    const auto pts = m.face_points(f);
    auto local = triangulate_polygon(pts);
    std::vector<std::array<int, 3>> tris;
    for (const auto& t : local)
        if (geo::orient(pts[t[0]], pts[t[1]], pts[t[2]]) > 0)
            tris.push_back({loop[t[0]], loop[t[1]], loop[t[2]]});
    const int nt = int(tris.size());
    std::vector<int> group_of(nt, -1);
    std::vector<std::vector<int>> pieces;
    auto shares_edge = [&](int a, int b) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (tris[a][i] == tris[b][(j + 1) % 3] && tris[a][(i + 1) % 3] == tris[b][j])
                    return true;
        return false;
    };
    for (int seed = 0; seed < nt; ++seed) {
        if (group_of[seed] >= 0)
            continue;
        std::vector<int> group{seed};
        group_of[seed] = int(pieces.size());
        bool grew = true;
        while (grew) {
            grew = false;
            for (int t = 0; t < nt; ++t) {
                if (group_of[t] >= 0)
                    continue;
                if (std::none_of(group.begin(), group.end(), [&](int g) { return shares_edge(g, t); }))
                    continue;
                auto trial = group;
                trial.push_back(t);
                auto l = loop_of_triangles(tris, trial);
                if (l.size() < 3 || !is_star_shaped(points_of(m.vertices(), l)))
                    continue;
                group = std::move(trial);
                group_of[t] = int(pieces.size());
                grew = true;
            }
        }
        pieces.push_back(loop_of_triangles(tris, group));
    }
    return pieces;
}

// Faces across the edges of f that block the view from its barycenter;
// sets `hits_boundary` when a blocking edge lies on the mesh boundary.
std::vector<int> blocking_neighbors(const PolyMesh& m, int f, bool& hits_boundary)
{
    const auto pts = m.face_points(f);
    const Vec2 b = geo::area_centroid(pts);
    const int n = m.arity(f);
    const double scale = geo::diameter(pts);
    std::set<int> crossed;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            if (k == i || (k + 1) % n == i)
                continue;
            const Vec2& a0 = pts[k];
            const Vec2& a1 = pts[(k + 1) % n];
            // closed-segment intersection, so grazing a reflex vertex counts
            const double d1 = geo::orient(a0, a1, b), d2 = geo::orient(a0, a1, pts[i]);
            const double d3 = geo::orient(b, pts[i], a0), d4 = geo::orient(b, pts[i], a1);
            const double tol = 1e-12 * scale * scale;
            const bool straddle1 = (d1 >= -tol && d2 <= tol) || (d1 <= tol && d2 >= -tol);
            const bool straddle2 = (d3 >= -tol && d4 <= tol) || (d3 <= tol && d4 >= -tol);
            if (straddle1 && straddle2)
                crossed.insert(k);
        }
    }
    std::set<int> out;
    hits_boundary = false;
    for (int k : crossed) {
        const int t = m.twin(m.halfedge(f, k));
        if (t < 0)
            hits_boundary = true;
        else
            out.insert(m.face_of(t));
    }
    return {out.begin(), out.end()};
}

int first_non_star(const PolyMesh& m)
{
    for (int f = 0; f < m.num_faces(); ++f)
        if (m.arity(f) > 4 && !is_star_shaped(m.face_points(f)))
            return f;
    return -1;
}

PolyMesh split_into_pieces(const PolyMesh& m, int f)
{
    auto pieces = star_pieces(m, f);
    std::vector<std::vector<int>> out;
    for (int g = 0; g < m.num_faces(); ++g)
        if (g != f)
            out.emplace_back(m.face(g).begin(), m.face(g).end());
    for (auto& p : pieces) {
        if (p.size() < 3)
            throw Error(ErrorCode::MergeFailed, "could not regroup the triangulation of face " + std::to_string(f));
        out.push_back(std::move(p));
    }
    return compact_mesh(m.vertices(), out);
}

} // namespace

PolyMesh make_star_shaped(const PolyMesh& mesh, StarShapeReport* report)
{
    constexpr int max_rounds = 12;
    StarShapeReport rep;
    PolyMesh cur = mesh;
    for (int f = first_non_star(cur); f >= 0; f = first_non_star(cur)) {
        int iters = 0;
        bool triangulate = false;
        while (true) {
            if (is_star_shaped(cur.face_points(f)))
                break;
            if (++iters > max_rounds) {
                triangulate = true;
                break;
            }
            bool hits_boundary = false;
            auto nb = blocking_neighbors(cur, f, hits_boundary);
            if (hits_boundary || nb.empty()) {
                triangulate = true;
                break;
            }
            nb.push_back(f);
            if (int(nb.size()) >= cur.num_faces())
                throw Error(ErrorCode::MergeFailed, "merging consumed the whole mesh");
            try {
                cur = merge_faces(cur, nb);
            } catch (const Error&) {
                triangulate = true;
                break;
            }
            f = cur.num_faces() - 1;
        }
        if (triangulate) {
            cur = split_into_pieces(cur, f);
            ++rep.triangulated;
        }
        ++rep.polygons_fixed;
        rep.iterations.push_back(iters);
        rep.max_iterations = std::max(rep.max_iterations, iters);
    }
    if (report)
        *report = rep;
    return cur;
}

RemeshPlan empty_plan(const PolyMesh& mesh)
{
    RemeshPlan p;
    p.edge_splits.assign(mesh.num_edges(), 1);
    p.rings.assign(mesh.num_faces(), 0);
    p.centers.assign(mesh.num_faces(), Vec2::Zero());
    return p;
}

PolyMesh remesh(const PolyMesh& m, RemeshPlan plan)
{
    const int ne = m.num_edges();
    // quads keep their tensor structure, so opposite edges share a split count
    std::vector<int> parent(ne);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int e) {
        while (parent[e] != e)
            e = parent[e] = parent[parent[e]];
        return e;
    };
    for (int f = 0; f < m.num_faces(); ++f) {
        if (!m.is_quad(f) || plan.rings[f] > 0)
            continue;
        for (int d = 0; d < 2; ++d) {
            const int a = find(m.edge_of(m.halfedge(f, d))), b = find(m.edge_of(m.halfedge(f, d + 2)));
            if (a != b)
                parent[a] = b;
        }
    }
    std::vector<int> cls_max(ne, 1);
    for (int e = 0; e < ne; ++e)
        cls_max[find(e)] = std::max(cls_max[find(e)], plan.edge_splits[e]);
    std::vector<int> s(ne);
    for (int e = 0; e < ne; ++e)
        s[e] = cls_max[find(e)];

    std::vector<Vec2> verts = m.vertices();
    std::vector<std::vector<int>> epts(ne);
    for (int e = 0; e < ne; ++e) {
        const int a = m.edge_v0(e), b = m.edge_v1(e);
        epts[e].push_back(a);
        for (int k = 1; k < s[e]; ++k) {
            epts[e].push_back(int(verts.size()));
            const double t = double(k) / s[e];
            verts.push_back((1.0 - t) * m.vertex(a) + t * m.vertex(b));
        }
        epts[e].push_back(b);
    }
    auto hpts = [&](int h) {
        const int e = m.edge_of(h);
        auto p = epts[e];
        if (m.edge_halfedge(e) != h)
            std::reverse(p.begin(), p.end());
        return p;
    };
    auto boundary_loop = [&](int f) {
        std::vector<int> loop;
        for (int k = 0; k < m.arity(f); ++k) {
            auto p = hpts(m.halfedge(f, k));
            loop.insert(loop.end(), p.begin(), p.end() - 1);
        }
        return loop;
    };

    std::vector<std::vector<int>> faces;
    for (int f = 0; f < m.num_faces(); ++f) {
        if (plan.rings[f] > 0) {
            const auto outer = boundary_loop(f);
            const int n = int(outer.size());
            const int R = plan.rings[f];
            const Vec2 c = plan.centers[f];
            std::vector<std::vector<int>> layers(R + 1);
            layers[R] = outer;
            for (int k = 0; k < R; ++k) {
                const double t = double(k + 1) / (R + 1);
                for (int v : outer) {
                    layers[k].push_back(int(verts.size()));
                    verts.push_back(c + t * (verts[v] - c));
                }
            }
            for (int k = R; k >= 1; --k)
                for (int i = 0; i < n; ++i) {
                    const int j = (i + 1) % n;
                    faces.push_back({layers[k][i], layers[k][j], layers[k - 1][j], layers[k - 1][i]});
                }
            faces.push_back(layers[0]);
        } else if (m.is_quad(f)) {
            const int a = s[m.edge_of(m.halfedge(f, 0))];
            const int b = s[m.edge_of(m.halfedge(f, 1))];
            std::vector<int> grid((a + 1) * (b + 1), -1);
            auto at = [&](int i, int j) -> int& { return grid[j * (a + 1) + i]; };
            const auto e0 = hpts(m.halfedge(f, 0)), e1 = hpts(m.halfedge(f, 1));
            const auto e2 = hpts(m.halfedge(f, 2)), e3 = hpts(m.halfedge(f, 3));
            for (int i = 0; i <= a; ++i) {
                at(i, 0) = e0[i];
                at(a - i, b) = e2[i];
            }
            for (int j = 0; j <= b; ++j) {
                at(a, j) = e1[j];
                at(0, b - j) = e3[j];
            }
            const auto q = m.face(f);
            for (int j = 1; j < b; ++j)
                for (int i = 1; i < a; ++i) {
                    const double u = double(i) / a, v = double(j) / b;
                    at(i, j) = int(verts.size());
                    verts.push_back((1 - u) * (1 - v) * m.vertex(q[0]) + u * (1 - v) * m.vertex(q[1]) + u * v * m.vertex(q[2]) +
                                    (1 - u) * v * m.vertex(q[3]));
                }
            for (int j = 0; j < b; ++j)
                for (int i = 0; i < a; ++i)
                    faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)});
        } else {
            faces.push_back(boundary_loop(f));
        }
    }
    return PolyMesh(std::move(verts), faces);
}

PolyMesh polar_refine(const PolyMesh& mesh, std::span<const int> polygons, int rings, double target_edge_len)
{
    if (rings < 1)
        throw Error(ErrorCode::InvalidConfig, "polar refinement needs at least one ring");
    const double target = target_edge_len > 0 ? target_edge_len : mesh.average_edge_length();
    auto plan = empty_plan(mesh);
    for (int f : polygons) {
        const auto info = polygon_kernel(mesh.face_points(f));
        if (info.empty)
            throw Error(ErrorCode::NotStarShaped, "face " + std::to_string(f) + " has an empty kernel");
        plan.rings[f] = rings;
        plan.centers[f] = info.center;
        for (int k = 0; k < mesh.arity(f); ++k) {
            const int e = mesh.edge_of(mesh.halfedge(f, k));
            const int segs = std::max(1, int(std::lround(mesh.edge_length(e) / target)));
            plan.edge_splits[e] = std::max(plan.edge_splits[e], segs);
        }
    }
    return remesh(mesh, std::move(plan));
}

PolyMesh polar_refine(const PolyMesh& mesh, int polygon, int rings, double target_edge_len)
{
    const int one[1] = {polygon};
    return polar_refine(mesh, std::span<const int>(one), rings, target_edge_len);
}

std::vector<char> polygon_mask(const PolyMesh& mesh, std::span<const int> extra_polygons)
{
    std::vector<char> mask(mesh.num_faces(), 0);
    for (int f = 0; f < mesh.num_faces(); ++f)
        mask[f] = mesh.is_quad(f) ? 0 : 1;
    for (int f : extra_polygons)
        mask.at(f) = 1;
    return mask;
}

std::vector<int> separation_violations(const PolyMesh& mesh)
{
    const auto mask = polygon_mask(mesh);
    std::vector<int> bad;
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (!mask[f])
            continue;
        bool ok = !mesh.touches_boundary(f);
        for (int g : mesh.vertex_neighbors(f))
            ok = ok && !mask[g];
        if (!ok)
            bad.push_back(f);
    }
    return bad;
}

PolyMesh ensure_separation(const PolyMesh& mesh, int rings, double target_edge_len)
{
    PolyMesh cur = mesh;
    const double target = target_edge_len > 0 ? target_edge_len : mesh.average_edge_length();
    for (int round = 0; round < 8; ++round) {
        const auto bad = separation_violations(cur);
        if (bad.empty())
            return cur;
        cur = polar_refine(cur, bad, rings, target);
    }
    if (!separation_violations(cur).empty())
        throw Error(ErrorCode::SeparationViolated, "polygons remain adjacent after repeated ring insertion");
    return cur;
}

PolyMesh uniform_refine(const PolyMesh& mesh)
{
    auto plan = empty_plan(mesh);
    std::fill(plan.edge_splits.begin(), plan.edge_splits.end(), 2);
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (mesh.is_quad(f))
            continue;
        const auto info = polygon_kernel(mesh.face_points(f));
        if (info.empty)
            throw Error(ErrorCode::NotStarShaped, "face " + std::to_string(f) + " has an empty kernel");
        plan.rings[f] = 1;
        plan.centers[f] = info.center;
    }
    return remesh(mesh, std::move(plan));
}

} // namespace polyspline
