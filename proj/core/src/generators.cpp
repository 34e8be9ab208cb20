#include "polyspline/generators.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "polyspline/error.hpp"
#include "polyspline/preprocess.hpp"

namespace polyspline {

PolyMesh regular_grid(int nx, int ny, Vec2 lo, Vec2 hi)
{
    if (nx < 1 || ny < 1)
        throw Error(ErrorCode::InvalidConfig, "grid needs at least one cell per direction");
    std::vector<Vec2> v;
    v.reserve((nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            v.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
    std::vector<std::vector<int>> f;
    f.reserve(nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int a = j * (nx + 1) + i;
            f.push_back({a, a + 1, a + nx + 2, a + nx + 1});
        }
    return PolyMesh(std::move(v), f);
}

PolyMesh hybrid_cross_mesh(int n)
{
    if (n < 5)
        throw Error(ErrorCode::InvalidConfig, "hybrid mesh needs n >= 5");
    const auto grid = regular_grid(n, n);
    const int c = n / 2;
    const int cells[5] = {c * n + c, c * n + c - 1, c * n + c + 1, (c - 1) * n + c, (c + 1) * n + c};
    return ensure_separation(merge_faces(grid, cells));
}

PolyMesh parallelogram_grid(int n, double shear)
{
    auto g = regular_grid(n, n);
    auto v = g.vertices();
    for (auto& p : v)
        p.x() += shear * p.y();
    return PolyMesh(std::move(v), g.face_list());
}

PerturbedMesh perturb_and_mark(const PolyMesh& mesh, double fraction, double lo, double hi, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<int> candidates;
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (mesh.is_quad(f) && !mesh.touches_boundary(f))
            candidates.push_back(f);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    int quads = 0;
    for (int f = 0; f < mesh.num_faces(); ++f)
        quads += mesh.is_quad(f) ? 1 : 0;
    const int want = int(std::lround(fraction * quads));

    PerturbedMesh out;
    std::vector<char> blocked(mesh.num_faces(), 0);
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (!mesh.is_quad(f)) {
            blocked[f] = 1;
            for (int g : mesh.vertex_neighbors(f))
                blocked[g] = 1;
        }
    for (int f : candidates) {
        if (int(out.marked.size()) >= want)
            break;
        if (blocked[f])
            continue;
        out.marked.push_back(f);
        blocked[f] = 1;
        for (int g : mesh.vertex_neighbors(f))
            blocked[g] = 1;
    }
    std::sort(out.marked.begin(), out.marked.end());

    auto verts = mesh.vertices();
    std::uniform_int_distribution<int> corner(0, 3);
    std::uniform_real_distribution<double> amount(lo, hi);
    std::set<int> moved;
    for (int f : out.marked) {
        const auto q = mesh.face(f);
        const int k = corner(rng);
        const double t = amount(rng);
        const int v = q[k];
        if (!moved.insert(v).second)
            continue;
        verts[v] = verts[v] + t * (mesh.vertex(q[(k + 2) % 4]) - mesh.vertex(v));
    }
    out.mesh = PolyMesh(std::move(verts), mesh.face_list());
    return out;
}

std::vector<PolyMesh> preprocess_corpus(int count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::vector<PolyMesh> out;
    while (int(out.size()) < count) {
        const int n = std::uniform_int_distribution<int>(5, 9)(rng);
        auto grid = regular_grid(n, n);
        // jitter interior vertices slightly; cells stay convex
        auto verts = grid.vertices();
        std::uniform_real_distribution<double> jit(-0.15 / n, 0.15 / n);
        for (int v = 0; v < grid.num_vertices(); ++v)
            if (!grid.is_boundary_vertex(v))
                verts[v] += Vec2(jit(rng), jit(rng));
        PolyMesh mesh(std::move(verts), grid.face_list());

        // grow random clusters of cells by random walks on the grid
        const int clusters = std::uniform_int_distribution<int>(1, 3)(rng);
        std::vector<int> owner(n * n, -1);
        std::vector<std::vector<int>> groups;
        for (int c = 0; c < clusters; ++c) {
            const int size = std::uniform_int_distribution<int>(2, 6)(rng);
            int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
            int j = std::uniform_int_distribution<int>(0, n - 1)(rng);
            std::vector<int> g;
            for (int step = 0; step < 4 * size && int(g.size()) < size; ++step) {
                const int cell = j * n + i;
                if (owner[cell] < 0) {
                    owner[cell] = c;
                    g.push_back(cell);
                } else if (owner[cell] != c) {
                    break;
                }
                const int dir = std::uniform_int_distribution<int>(0, 3)(rng);
                i = std::clamp(i + (dir == 0) - (dir == 1), 0, n - 1);
                j = std::clamp(j + (dir == 2) - (dir == 3), 0, n - 1);
            }
            if (g.size() >= 2)
                groups.push_back(g);
            else
                for (int cell : g)
                    owner[cell] = -1;
        }
        if (groups.empty())
            continue;
        // merge groups one at a time; merged faces move to the end
        PolyMesh cur = mesh;
        std::vector<int> tag(mesh.num_faces(), -1);
        for (std::size_t gi = 0; gi < groups.size(); ++gi)
            for (int cell : groups[gi])
                tag[cell] = int(gi);
        bool ok = true;
        for (std::size_t gi = 0; gi < groups.size() && ok; ++gi) {
            std::vector<int> current;
            for (int f = 0; f < cur.num_faces(); ++f)
                if (tag[f] == int(gi))
                    current.push_back(f);
            try {
                cur = merge_faces(cur, current);
            } catch (const Error&) {
                ok = false;
                break;
            }
            std::vector<int> next_tag;
            for (int t : tag)
                if (t != int(gi))
                    next_tag.push_back(t);
            next_tag.push_back(-2);
            tag = std::move(next_tag);
        }
        if (!ok)
            continue;
        out.push_back(std::move(cur));
    }
    return out;
}

} // namespace polyspline
