#include "polyspline/discretization.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "polyspline/error.hpp"
#include "polyspline/geometry.hpp"
#include "polyspline/preprocess.hpp"

namespace polyspline {

namespace {

CellClass classify_for_mode(const PolyMesh& mesh, BasisMode mode, std::span<const int> extra, std::span<const int> demoted)
{
    auto cc = classify_cells(mesh, extra);
    if (mode != BasisMode::PolySpline)
        for (auto& t : cc.tags)
            if (t == CellTag::SplineCompatible)
                t = CellTag::Q2Quad;
    for (int f : demoted)
        if (cc.tags[f] == CellTag::SplineCompatible)
            cc.tags[f] = CellTag::Q2Quad;
    return cc;
}

// Smallest det Dg over a 5x5 grid and the quadrature points, relative to the
// cell's area.
double relative_min_det(const PolyMesh& mesh, const GeoMap& g, int f, const QuadratureRule& rule)
{
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i)
            m = std::min(m, g.jacobian(f, Vec2(0.25 * i, 0.25 * j)).determinant());
    for (const auto& p : rule.points)
        m = std::min(m, g.jacobian(f, p).determinant());
    return m / mesh.face_area(f);
}

} // namespace

Discretization::Discretization(PolyMesh mesh, DiscretizationOptions options)
    : mesh_(std::move(mesh)), options_(std::move(options))
{
    const auto t0 = std::chrono::steady_clock::now();
    square_rule_ = quad_rule_square(options_.quad_degree);
    // spline cells whose fitted map folds (or drags a tied Q2 neighbor into
    // folding) fall back to bilinear Q2 cells
    std::vector<int> demoted;
    for (int round = 0;; ++round) {
        classes_ = classify_for_mode(mesh_, options_.mode, options_.extra_polygons, demoted);
        bases_ = build_bases(mesh_, classes_, options_.mode == BasisMode::Q1 ? 1 : 2);
        geomap_ = fit_geometric_map(mesh_, classes_, bases_);
        if (classes_.count(CellTag::SplineCompatible) == 0 || round == 8)
            break;
        std::vector<int> bad;
        const GeoMap bilinear = GeoMap::bilinear(mesh_);
        for (int f = 0; f < mesh_.num_faces(); ++f) {
            const auto tag = classes_[f];
            if (tag == CellTag::Polygon || relative_min_det(mesh_, geomap_, f, square_rule_) > kMinRelativeDet)
                continue;
            if (tag == CellTag::SplineCompatible) {
                bad.push_back(f);
            } else if (relative_min_det(mesh_, bilinear, f, square_rule_) > kMinRelativeDet) {
                for (int g : mesh_.vertex_neighbors(f))
                    if (classes_[g] == CellTag::SplineCompatible)
                        bad.push_back(g);
            }
        }
        if (bad.empty())
            break;
        demoted.insert(demoted.end(), bad.begin(), bad.end());
        std::sort(demoted.begin(), demoted.end());
        demoted.erase(std::unique(demoted.begin(), demoted.end()), demoted.end());
    }
    demoted_ = int(demoted.size());
    polygon_index_.assign(mesh_.num_faces(), -1);
    for (int f = 0; f < mesh_.num_faces(); ++f)
        if (classes_[f] == CellTag::Polygon)
            build_polygon(f);

    // dofs with a nonzero trace on the domain boundary
    for (int h = 0; h < mesh_.num_halfedges(); ++h) {
        if (!mesh_.is_boundary_halfedge(h))
            continue;
        const int f = mesh_.face_of(h);
        const int d = mesh_.local_index(h);
        std::vector<Vec2> params;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            params.push_back(quad_side_point(d, t));
        const auto ev = evaluate(f, params);
        for (int c = 0; c < int(ev.dofs.size()); ++c)
            if (ev.values.col(c).cwiseAbs().maxCoeff() > 1e-12)
                bases_.table[ev.dofs[c]].boundary = true;
    }
    basis_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const PolygonBasis* Discretization::polygon_basis(int cell) const
{
    const int i = polygon_index_[cell];
    return i < 0 ? nullptr : &polygons_[i];
}

ElementValues Discretization::quad_values(int cell, std::span<const Vec2> params, std::span<const double> weights) const
{
    const auto& eb = bases_.elements[cell];
    ElementValues ev;
    ev.cell = cell;
    ev.dofs = eb.dofs;
    const int np = int(params.size()), nd = int(eb.dofs.size());
    ev.values.resize(np, nd);
    ev.dx.resize(np, nd);
    ev.dy.resize(np, nd);
    ev.points.resize(np);
    if (!weights.empty())
        ev.weights.resize(np);
    Eigen::VectorXd val;
    Eigen::Matrix2Xd grad;
    for (int q = 0; q < np; ++q) {
        const auto g = geomap_.eval(cell, params[q]);
        eb.eval_global(params[q].x(), params[q].y(), val, grad);
        const Eigen::Matrix2Xd pg = g.push_gradients(grad);
        ev.values.row(q) = val.transpose();
        ev.dx.row(q) = pg.row(0);
        ev.dy.row(q) = pg.row(1);
        ev.points[q] = g.x;
        if (!weights.empty())
            ev.weights[q] = weights[q] * g.abs_det();
    }
    return ev;
}

ElementValues Discretization::element_values(int cell) const
{
    if (const auto* pb = polygon_basis(cell)) {
        ElementValues ev = evaluate(cell, pb->quad.points);
        ev.weights = pb->quad.weights;
        return ev;
    }
    return quad_values(cell, square_rule_.points, square_rule_.weights);
}

ElementValues Discretization::evaluate(int cell, std::span<const Vec2> points) const
{
    const auto* pb = polygon_basis(cell);
    if (!pb)
        return quad_values(cell, points, {});
    ElementValues ev;
    ev.cell = cell;
    ev.dofs = pb->dofs;
    const int np = int(points.size()), nd = int(pb->dofs.size());
    ev.values.resize(np, nd);
    ev.dx.resize(np, nd);
    ev.dy.resize(np, nd);
    ev.points.assign(points.begin(), points.end());
    Eigen::VectorXd val;
    Eigen::Matrix2Xd grad;
    for (int q = 0; q < np; ++q) {
        pb->eval(points[q], val, grad);
        ev.values.row(q) = val.transpose();
        ev.dx.row(q) = grad.row(0);
        ev.dy.row(q) = grad.row(1);
    }
    return ev;
}

void Discretization::polygon_edge_trace(int cell, int k, double t, std::vector<int>& dofs, Eigen::VectorXd& values) const
{
    const int h = mesh_.halfedge(cell, k);
    const int tw = mesh_.twin(h);
    if (tw < 0)
        throw Error(ErrorCode::SeparationViolated, "polygon " + std::to_string(cell) + " touches the boundary");
    const int nb = mesh_.face_of(tw);
    const auto& eb = bases_.elements[nb];
    if (eb.kind == ElementKind::Polygon)
        throw Error(ErrorCode::SeparationViolated, "polygons " + std::to_string(cell) + " and " + std::to_string(nb) + " share an edge");
    const Vec2 p = quad_side_point(mesh_.local_index(tw), 1.0 - t);
    Eigen::Matrix2Xd grad;
    eb.eval_global(p.x(), p.y(), values, grad);
    dofs = eb.dofs;
}

void Discretization::build_polygon(int cell)
{
    const auto& opt = options_.poly;
    const auto poly = mesh_.face_points(cell);
    const int n = int(poly.size());

    PolygonBasis pb;
    pb.cell = cell;
    pb.kernel = opt.kernel;
    const auto star = polygon_kernel(poly);
    if (star.empty)
        throw Error(ErrorCode::NotStarShaped, "polygon " + std::to_string(cell) + " has an empty kernel");
    pb.star_center = star.center;
    pb.frame.origin = star.center;
    double rad = 0.0;
    for (const auto& p : poly)
        rad = std::max(rad, (p - star.center).norm());
    pb.frame.scale = rad;
    pb.quad = quad_rule_polygon(poly, star.center, opt.quad_degree);

    // boundary data: traces of the neighbor elements at the collocation points
    const auto colloc = sample_collocation(poly, std::max(opt.samples_per_edge, 3));
    std::map<int, int> local_of;
    std::vector<std::vector<std::pair<int, double>>> rows(colloc.size());
    std::vector<int> dofs;
    Eigen::VectorXd vals;
    for (std::size_t p = 0; p < colloc.size(); ++p) {
        polygon_edge_trace(cell, colloc[p].edge, colloc[p].t, dofs, vals);
        for (int c = 0; c < int(dofs.size()); ++c) {
            if (std::abs(vals(c)) <= 1e-13)
                continue;
            auto [it, fresh] = local_of.emplace(dofs[c], 0);
            (void)fresh;
            rows[p].emplace_back(dofs[c], vals(c));
        }
    }
    for (auto& [dof, l] : local_of) {
        l = int(pb.dofs.size());
        pb.dofs.push_back(dof);
    }
    const int nj = int(pb.dofs.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(colloc.size(), nj);
    for (std::size_t p = 0; p < colloc.size(); ++p)
        for (const auto& [dof, v] : rows[p])
            B(p, local_of[dof]) += v;

    auto mode = opt.constraints;
    if (options_.mode == BasisMode::Q1 && mode == ConstraintMode::Quadratic)
        mode = ConstraintMode::Linear;
    const auto fields = constraint_fields(options_.pde, mode, pb.frame);

    int per_vertex = opt.centers_per_vertex;
    if (per_vertex <= 0) {
        const int want = std::max(options_.pde.kind == PdeKind::Elasticity ? 15 : 5, nj);
        per_vertex = (want + n - 1) / n;
    }
    pb.centers = place_kernel_centers(poly, per_vertex, opt.offset_factor);

    const Eigen::MatrixXd A = collocation_matrix(colloc, pb.centers, opt.kernel, pb.frame);
    const Eigen::MatrixXd C = constraint_rows(fields, pb.centers, opt.kernel, pb.frame, pb.quad);
    const Eigen::MatrixXd c = consistency_rhs(*this, cell, fields, pb.dofs);
    pb.coeffs = solve_constrained_lsq(A, B, C, c, &pb.kkt_rcond, opt.ridge, pb.num_centers());
    pb.fit_residual = nj > 0 ? (A * pb.coeffs - B).cwiseAbs().maxCoeff() : 0.0;
    pb.constraint_residual = C.rows() > 0 && nj > 0 ? (C * pb.coeffs - c).cwiseAbs().maxCoeff() : 0.0;

    polygon_index_[cell] = int(polygons_.size());
    polygons_.push_back(std::move(pb));
}

Eigen::MatrixXd consistency_rhs(const Discretization& disc, int cell, std::span<const AffineField> fields, std::span<const int> dofs)
{
    const auto& mesh = disc.mesh();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(fields.size(), dofs.size());
    if (fields.empty() || dofs.empty())
        return c;
    std::map<int, int> local;
    for (int l = 0; l < int(dofs.size()); ++l)
        local[dofs[l]] = l;
    // candidate cells: everything touching the polygon's vertices
    std::vector<int> cells;
    for (int v : mesh.face(cell))
        for (int g : mesh.vertex_faces(v))
            if (g != cell)
                cells.push_back(g);
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    for (int g : cells) {
        if (disc.classes()[g] == CellTag::Polygon)
            continue;
        const auto ev = disc.element_values(g);
        for (int col = 0; col < int(ev.dofs.size()); ++col) {
            auto it = local.find(ev.dofs[col]);
            if (it == local.end())
                continue;
            for (std::size_t r = 0; r < fields.size(); ++r) {
                double acc = 0.0;
                const double dv = fields[r].div();
                for (std::size_t q = 0; q < ev.weights.size(); ++q) {
                    const Vec2 S = fields[r].at(ev.points[q]);
                    acc += ev.weights[q] * (dv * ev.values(q, col) + S.x() * ev.dx(q, col) + S.y() * ev.dy(q, col));
                }
                c(r, it->second) -= acc;
            }
        }
    }
    return c;
}

} // namespace polyspline
