#include "polyspline/bases.hpp"

#include <algorithm>
#include <string>

#include "polyspline/bspline.hpp"
#include "polyspline/error.hpp"
#include "polyspline/lagrange.hpp"

namespace polyspline {

int DofTable::find_or_add(DofKind kind, int entity, const Vec2& anchor)
{
    const long long key = (static_cast<long long>(kind) << 40) | static_cast<long long>(entity);
    auto [it, fresh] = index_.emplace(key, size());
    if (fresh)
        records_.push_back({kind, entity, anchor});
    return it->second;
}

int DofTable::find(DofKind kind, int entity) const
{
    const long long key = (static_cast<long long>(kind) << 40) | static_cast<long long>(entity);
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

std::array<Knots4, 3> spline_knots_1d(bool lo, bool hi)
{
    return {Knots4{lo ? 0.0 : -2.0, lo ? 0.0 : -1.0, 0.0, 1.0}, Knots4{lo ? 0.0 : -1.0, 0.0, 1.0, hi ? 1.0 : 2.0},
            Knots4{0.0, 1.0, hi ? 1.0 : 2.0, hi ? 1.0 : 3.0}};
}

int ElementBasis::local_size() const
{
    switch (kind) {
    case ElementKind::Spline: return 9;
    case ElementKind::Lagrange1: return 4;
    case ElementKind::Lagrange2: return 9;
    case ElementKind::Polygon: return 0;
    }
    return 0;
}

void ElementBasis::eval_local(double u, double v, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const
{
    if (kind == ElementKind::Spline) {
        double bu[3], du[3], bv[3], dv[3];
        for (int i = 0; i < 3; ++i) {
            std::tie(bu[i], du[i]) = bspline_quad_eval_span(knots_u[i], u, 0.0, 1.0);
            std::tie(bv[i], dv[i]) = bspline_quad_eval_span(knots_v[i], v, 0.0, 1.0);
        }
        values.resize(9);
        grads.resize(2, 9);
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i) {
                values(i + 3 * j) = bu[i] * bv[j];
                grads.col(i + 3 * j) << du[i] * bv[j], bu[i] * dv[j];
            }
        return;
    }
    if (kind == ElementKind::Polygon)
        throw Error(ErrorCode::InvalidConfig, "polygon cells have no parametric element");
    auto e = lagrange_basis(kind == ElementKind::Lagrange1 ? 1 : 2, u, v);
    values = std::move(e.values);
    grads = std::move(e.grads);
}

void ElementBasis::eval_global(double u, double v, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const
{
    Eigen::VectorXd lv;
    Eigen::Matrix2Xd lg;
    eval_local(u, v, lv, lg);
    values = l2g.transpose() * lv;
    grads = lg * l2g;
}

Vec2 quad_corner(int k)
{
    static const Vec2 c[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return c[((k % 4) + 4) % 4];
}

Vec2 quad_side_point(int d, double s)
{
    const Vec2 a = quad_corner(d), b = quad_corner(d + 1);
    return (1.0 - s) * a + s * b;
}

ElementBasis spline_element_basis(const PolyMesh& m, const CellClass& classes, int cell, DofTable& table)
{
    if (classes[cell] != CellTag::SplineCompatible)
        throw Error(ErrorCode::NotCompatible, "cell " + std::to_string(cell) + " is not spline compatible");
    const auto st = spline_stencil(m, cell);
    if (!st)
        throw Error(ErrorCode::NotCompatible, "cell " + std::to_string(cell) + " has an irregular one-ring");
    ElementBasis eb;
    eb.cell = cell;
    eb.kind = ElementKind::Spline;
    const auto& sf = st->side_face;
    eb.knots_u = spline_knots_1d(sf[3] < 0, sf[1] < 0);
    eb.knots_v = spline_knots_1d(sf[0] < 0, sf[2] < 0);

    auto h = [&](int d) { return m.halfedge(cell, d); };
    auto cell_dof = [&](int f) { return table.find_or_add(DofKind::SplineCell, f, [&] {
                                     Vec2 c = Vec2::Zero();
                                     for (int v : m.face(f))
                                         c += m.vertex(v);
                                     return Vec2(c / m.arity(f));
                                 }()); };
    auto edge_dof = [&](int e) { return table.find_or_add(DofKind::SplineEdge, e, m.edge_midpoint(e)); };
    auto side_dof = [&](int d) { return sf[d] >= 0 ? cell_dof(sf[d]) : edge_dof(m.edge_of(h(d))); };
    auto corner_dof = [&](int c) {
        const int dl = (c + 3) % 4;
        if (sf[dl] >= 0 && sf[c] >= 0)
            return cell_dof(st->corner_face[c]);
        if (sf[dl] >= 0)
            return edge_dof(m.edge_of(m.prev(m.twin(h(dl)))));
        if (sf[c] >= 0)
            return edge_dof(m.edge_of(m.next(m.twin(h(c)))));
        const int v = m.face(cell)[c];
        return table.find_or_add(DofKind::SplineVertex, v, m.vertex(v));
    };

    // offset (i-1, j-1) picks the entity: sides 0..3 sit at (0,-1), (1,0),
    // (0,1), (-1,0) and corners 0..3 at (-1,-1), (1,-1), (1,1), (-1,1)
    eb.dofs.resize(9);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const int a = i - 1, b = j - 1;
            int dof;
            if (a == 0 && b == 0)
                dof = cell_dof(cell);
            else if (a == 0)
                dof = side_dof(b < 0 ? 0 : 2);
            else if (b == 0)
                dof = side_dof(a > 0 ? 1 : 3);
            else if (a < 0 && b < 0)
                dof = corner_dof(0);
            else if (a > 0 && b < 0)
                dof = corner_dof(1);
            else if (a > 0)
                dof = corner_dof(2);
            else
                dof = corner_dof(3);
            eb.dofs[i + 3 * j] = dof;
        }
    eb.l2g = Eigen::MatrixXd::Identity(9, 9);
    return eb;
}

namespace {

struct SplineHit {
    int cell = -1;
    Vec2 param;
};

// Lagrange element whose nodes on spline closures are tied to spline dofs.
ElementBasis lagrange_element(const PolyMesh& m, int cell, int order, DofTable& table, const std::vector<ElementBasis>& elements,
                              const std::vector<SplineHit>& vertex_hit, const std::vector<SplineHit>& edge_hit)
{
    ElementBasis eb;
    eb.cell = cell;
    eb.kind = order == 1 ? ElementKind::Lagrange1 : ElementKind::Lagrange2;
    const int n = order + 1;
    std::vector<std::vector<std::pair<int, double>>> rows(n * n);

    auto tie_to_spline = [&](const SplineHit& hit, std::vector<std::pair<int, double>>& row) {
        const auto& s = elements[hit.cell];
        Eigen::VectorXd val;
        Eigen::Matrix2Xd grad;
        s.eval_global(hit.param.x(), hit.param.y(), val, grad);
        for (int c = 0; c < val.size(); ++c)
            if (std::abs(val(c)) > 1e-14)
                row.emplace_back(s.dofs[c], val(c));
    };

    const auto q = m.face(cell);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            auto& row = rows[i + n * j];
            const int ci = i * 2 / order, cj = j * 2 / order; // position on the 3x3 node lattice
            if (ci != 1 && cj != 1) {
                const int k = ci == 0 ? (cj == 0 ? 0 : 3) : (cj == 0 ? 1 : 2);
                const int v = q[k];
                if (vertex_hit[v].cell >= 0)
                    tie_to_spline(vertex_hit[v], row);
                else
                    row.emplace_back(table.find_or_add(DofKind::LagrangeVertex, v, m.vertex(v)), 1.0);
            } else if (ci == 1 && cj == 1) {
                Vec2 c = Vec2::Zero();
                for (int v : q)
                    c += m.vertex(v);
                row.emplace_back(table.find_or_add(DofKind::LagrangeCell, cell, c / 4.0), 1.0);
            } else {
                const int d = cj == 0 ? 0 : ci == 2 ? 1 : cj == 2 ? 2 : 3;
                const int e = m.edge_of(m.halfedge(cell, d));
                if (edge_hit[e].cell >= 0)
                    tie_to_spline(edge_hit[e], row);
                else
                    row.emplace_back(table.find_or_add(DofKind::LagrangeEdge, e, m.edge_midpoint(e)), 1.0);
            }
        }

    for (const auto& row : rows)
        for (const auto& [dof, w] : row)
            if (std::find(eb.dofs.begin(), eb.dofs.end(), dof) == eb.dofs.end())
                eb.dofs.push_back(dof);
    eb.l2g = Eigen::MatrixXd::Zero(n * n, eb.dofs.size());
    for (int r = 0; r < n * n; ++r)
        for (const auto& [dof, w] : rows[r]) {
            const auto c = std::find(eb.dofs.begin(), eb.dofs.end(), dof) - eb.dofs.begin();
            eb.l2g(r, c) += w;
        }
    return eb;
}

} // namespace

BasisSet build_bases(const PolyMesh& m, const CellClass& classes, int lagrange_order)
{
    if (lagrange_order != 1 && lagrange_order != 2)
        throw Error(ErrorCode::InvalidConfig, "Lagrange order must be 1 or 2");
    BasisSet bs;
    bs.lagrange_order = lagrange_order;
    bs.elements.resize(m.num_faces());
    std::vector<SplineHit> vertex_hit(m.num_vertices()), edge_hit(m.num_edges());
    for (int f = 0; f < m.num_faces(); ++f) {
        bs.elements[f].cell = f;
        if (classes[f] != CellTag::SplineCompatible)
            continue;
        bs.elements[f] = spline_element_basis(m, classes, f, bs.table);
        for (int k = 0; k < 4; ++k) {
            const int v = m.face(f)[k];
            if (vertex_hit[v].cell < 0)
                vertex_hit[v] = {f, quad_corner(k)};
            const int e = m.edge_of(m.halfedge(f, k));
            if (edge_hit[e].cell < 0)
                edge_hit[e] = {f, quad_side_point(k, 0.5)};
        }
    }
    for (int f = 0; f < m.num_faces(); ++f)
        if (classes[f] == CellTag::Q2Quad)
            bs.elements[f] = lagrange_element(m, f, lagrange_order, bs.table, bs.elements, vertex_hit, edge_hit);
    return bs;
}

} // namespace polyspline
