#include "polyspline/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>

#include "polyspline/error.hpp"

namespace polyspline {

Eigen::MatrixXd element_stiffness(const ElementValues& ev, const Pde& pde)
{
    const int nd = int(ev.dofs.size());
    const auto& W = Eigen::Map<const Eigen::VectorXd>(ev.weights.data(), ev.weights.size());
    const Eigen::MatrixXd wdx = W.asDiagonal() * ev.dx;
    const Eigen::MatrixXd wdy = W.asDiagonal() * ev.dy;
    const Eigen::MatrixXd xx = ev.dx.transpose() * wdx;
    const Eigen::MatrixXd yy = ev.dy.transpose() * wdy;
    if (pde.kind == PdeKind::Poisson)
        return xx + yy;
    const Eigen::MatrixXd xy = ev.dx.transpose() * wdy; // (a, b) -> int dx_a dy_b
    const Eigen::MatrixXd yx = xy.transpose();
    const double lam = pde.lambda, mu = pde.mu;
    Eigen::MatrixXd K(2 * nd, 2 * nd);
    const Eigen::MatrixXd lap = xx + yy;
    // K[(a,al),(b,be)] = lam d_al a d_be b + mu (delta lap + d_be a d_al b)
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b) {
            K(2 * a, 2 * b) = lam * xx(a, b) + mu * (lap(a, b) + xx(a, b));
            K(2 * a, 2 * b + 1) = lam * xy(a, b) + mu * yx(a, b);
            K(2 * a + 1, 2 * b) = lam * yx(a, b) + mu * xy(a, b);
            K(2 * a + 1, 2 * b + 1) = lam * yy(a, b) + mu * (lap(a, b) + yy(a, b));
        }
    return K;
}

namespace {

void scatter(std::vector<Eigen::Triplet<double>>& trip, const std::vector<int>& dofs, int comps, const Eigen::MatrixXd& Ke)
{
    const int n = int(dofs.size()) * comps;
    for (int i = 0; i < n; ++i) {
        const int gi = dofs[i / comps] * comps + i % comps;
        for (int j = 0; j < n; ++j)
            if (Ke(i, j) != 0.0)
                trip.emplace_back(gi, dofs[j / comps] * comps + j % comps, Ke(i, j));
    }
}

} // namespace

SparseMatrix assemble_stiffness(const Discretization& disc)
{
    const auto& pde = disc.options().pde;
    const int comps = pde.components();
    std::vector<Eigen::Triplet<double>> trip;
    for (int f = 0; f < disc.mesh().num_faces(); ++f) {
        const auto ev = disc.element_values(f);
        scatter(trip, ev.dofs, comps, element_stiffness(ev, pde));
    }
    SparseMatrix K(disc.num_dofs(), disc.num_dofs());
    K.setFromTriplets(trip.begin(), trip.end());
    // symmetrize away rounding differences between (i,j) and (j,i) sums
    SparseMatrix Kt = K.transpose();
    return 0.5 * (K + Kt);
}

SparseMatrix assemble_mass(const Discretization& disc)
{
    std::vector<Eigen::Triplet<double>> trip;
    for (int f = 0; f < disc.mesh().num_faces(); ++f) {
        const auto ev = disc.element_values(f);
        const auto W = Eigen::Map<const Eigen::VectorXd>(ev.weights.data(), ev.weights.size());
        scatter(trip, ev.dofs, 1, ev.values.transpose() * W.asDiagonal() * ev.values);
    }
    SparseMatrix M(disc.num_scalar_dofs(), disc.num_scalar_dofs());
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

Eigen::VectorXd assemble_rhs(const Discretization& disc, const FieldFn& source)
{
    const int comps = disc.components();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(disc.num_dofs());
    if (!source)
        return b;
    for (int f = 0; f < disc.mesh().num_faces(); ++f) {
        const auto ev = disc.element_values(f);
        for (std::size_t q = 0; q < ev.weights.size(); ++q) {
            const Vec2 s = source(ev.points[q]);
            for (int a = 0; a < int(ev.dofs.size()); ++a)
                for (int c = 0; c < comps; ++c)
                    b(ev.dofs[a] * comps + c) += ev.weights[q] * ev.values(q, a) * s(c);
        }
    }
    return b;
}

namespace {

// Parametric points, physical points and arc-length weights of a Gauss rule
// on the boundary side of halfedge h.
struct EdgeSamples {
    int cell;
    std::vector<Vec2> params;
    std::vector<double> weights;
};

EdgeSamples edge_gauss(const Discretization& disc, int h, int degree)
{
    const auto& m = disc.mesh();
    EdgeSamples es;
    es.cell = m.face_of(h);
    const int d = m.local_index(h);
    const auto rule = quad_rule_segment(degree);
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q].x();
        const Vec2 p = quad_side_point(d, t);
        es.params.push_back(p);
        const Mat2 J = disc.geomap().jacobian(es.cell, p);
        const Vec2 tangent = J * (quad_corner(d + 1) - quad_corner(d));
        es.weights.push_back(rule.weights[q] * tangent.norm());
    }
    return es;
}

} // namespace

void apply_neumann(const Discretization& disc, const FieldFn& flux, const EdgePredicate& on_edge, Eigen::VectorXd& f)
{
    if (!flux)
        return;
    const auto& m = disc.mesh();
    const int comps = disc.components();
    for (int h = 0; h < m.num_halfedges(); ++h) {
        if (!m.is_boundary_halfedge(h))
            continue;
        const Vec2 mid = 0.5 * (m.vertex(m.from(h)) + m.vertex(m.to(h)));
        if (on_edge && !on_edge(mid))
            continue;
        const auto es = edge_gauss(disc, h, 8);
        const auto ev = disc.evaluate(es.cell, es.params);
        for (std::size_t q = 0; q < es.params.size(); ++q) {
            const Vec2 g = flux(ev.points[q]);
            for (int a = 0; a < int(ev.dofs.size()); ++a)
                for (int c = 0; c < comps; ++c)
                    f(ev.dofs[a] * comps + c) += es.weights[q] * ev.values(q, a) * g(c);
        }
    }
}

DirichletFit fit_dirichlet(const Discretization& disc, const FieldFn& data, const EdgePredicate& is_neumann, int samples_per_edge)
{
    const auto& m = disc.mesh();
    const int comps = disc.components();
    const int spe = std::max(samples_per_edge, 5);
    std::vector<int> local(disc.num_scalar_dofs(), -1);
    std::vector<int> dofs;
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Vec2> rhs;
    int row = 0;
    for (int h = 0; h < m.num_halfedges(); ++h) {
        if (!m.is_boundary_halfedge(h))
            continue;
        const Vec2 mid = 0.5 * (m.vertex(m.from(h)) + m.vertex(m.to(h)));
        if (is_neumann && is_neumann(mid))
            continue;
        const int cell = m.face_of(h);
        const int d = m.local_index(h);
        std::vector<Vec2> params;
        for (int i = 0; i < spe; ++i)
            params.push_back(quad_side_point(d, double(i) / (spe - 1)));
        const auto ev = disc.evaluate(cell, params);
        for (int q = 0; q < spe; ++q, ++row) {
            for (int a = 0; a < int(ev.dofs.size()); ++a) {
                const double v = ev.values(q, a);
                if (std::abs(v) <= 1e-13)
                    continue;
                int& l = local[ev.dofs[a]];
                if (l < 0) {
                    l = int(dofs.size());
                    dofs.push_back(ev.dofs[a]);
                }
                trip.emplace_back(row, l, v);
            }
            rhs.push_back(data ? data(ev.points[q]) : Vec2::Zero());
        }
    }
    DirichletFit fit;
    const int nb = int(dofs.size());
    if (nb == 0)
        return fit;
    SparseMatrix A(row, nb);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd B(row, comps);
    for (int r = 0; r < row; ++r)
        for (int c = 0; c < comps; ++c)
            B(r, c) = rhs[r](c);
    const SparseMatrix AtA = A.transpose() * A;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(AtA);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff())
        throw Error(ErrorCode::RankDeficient, "a boundary dof has no sample support in the Dirichlet fit");
    const Eigen::MatrixXd X = ldlt.solve(Eigen::MatrixXd(A.transpose() * B));
    fit.max_sample_misfit = (A * X - B).cwiseAbs().maxCoeff();
    fit.dofs.reserve(nb * comps);
    fit.values.resize(nb * comps);
    for (int l = 0; l < nb; ++l)
        for (int c = 0; c < comps; ++c) {
            fit.dofs.push_back(dofs[l] * comps + c);
            fit.values(l * comps + c) = X(l, c);
        }
    return fit;
}

SparseSystem apply_dirichlet(const SparseMatrix& K, const Eigen::VectorXd& f, const DirichletFit& fit)
{
    SparseSystem sys;
    const int n = int(K.rows());
    sys.K = K;
    sys.f = f;
    sys.fixed.assign(n, 0);
    sys.fixed_values = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < fit.dofs.size(); ++i) {
        sys.fixed[fit.dofs[i]] = 1;
        sys.fixed_values(fit.dofs[i]) = fit.values(i);
    }
    std::vector<int> index(n, -1);
    for (int i = 0; i < n; ++i)
        if (!sys.fixed[i]) {
            index[i] = int(sys.free_dofs.size());
            sys.free_dofs.push_back(i);
        }
    const int nf = int(sys.free_dofs.size());
    sys.f_free.resize(nf);
    for (int i = 0; i < nf; ++i)
        sys.f_free(i) = f(sys.free_dofs[i]);
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < K.outerSize(); ++col)
        for (SparseMatrix::InnerIterator it(K, col); it; ++it) {
            const int r = int(it.row()), c = int(it.col());
            if (index[r] < 0)
                continue;
            if (index[c] >= 0)
                trip.emplace_back(index[r], index[c], it.value());
            else
                sys.f_free(index[r]) -= it.value() * sys.fixed_values(c);
        }
    sys.K_free.resize(nf, nf);
    sys.K_free.setFromTriplets(trip.begin(), trip.end());
    return sys;
}

Eigen::VectorXd SparseSystem::expand(const Eigen::VectorXd& u_free) const
{
    Eigen::VectorXd u = fixed_values;
    for (std::size_t i = 0; i < free_dofs.size(); ++i)
        u(free_dofs[i]) = u_free(i);
    return u;
}

Vec2 evaluate_solution(const Discretization& disc, const Eigen::VectorXd& u, int cell, const Vec2& point)
{
    const Vec2 pts[1] = {point};
    const auto ev = disc.evaluate(cell, pts);
    const int comps = disc.components();
    Vec2 out = Vec2::Zero();
    for (int a = 0; a < int(ev.dofs.size()); ++a)
        for (int c = 0; c < comps; ++c)
            out(c) += ev.values(0, a) * u(ev.dofs[a] * comps + c);
    return out;
}

double dirichlet_trace_error(const Discretization& disc, const Eigen::VectorXd& u, const FieldFn& data,
                             const EdgePredicate& is_neumann, int samples_per_edge)
{
    const auto& m = disc.mesh();
    const int comps = disc.components();
    double err = 0.0;
    for (int h = 0; h < m.num_halfedges(); ++h) {
        if (!m.is_boundary_halfedge(h))
            continue;
        const Vec2 mid = 0.5 * (m.vertex(m.from(h)) + m.vertex(m.to(h)));
        if (is_neumann && is_neumann(mid))
            continue;
        std::vector<Vec2> params;
        for (int i = 0; i < samples_per_edge; ++i)
            params.push_back(quad_side_point(m.local_index(h), (i + 0.5) / samples_per_edge));
        const auto ev = disc.evaluate(m.face_of(h), params);
        for (std::size_t q = 0; q < params.size(); ++q) {
            const Vec2 d = data(ev.points[q]);
            for (int c = 0; c < comps; ++c) {
                double uh = 0.0;
                for (int a = 0; a < int(ev.dofs.size()); ++a)
                    uh += ev.values(q, a) * u(ev.dofs[a] * comps + c);
                err = std::max(err, std::abs(uh - d(c)));
            }
        }
    }
    return err;
}

Eigen::VectorXd fit_field(const Discretization& disc, const FieldFn& field)
{
    const int comps = disc.components();
    const int n = disc.num_scalar_dofs();
    std::vector<Vec2> params;
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i)
            params.emplace_back(0.25 * i, 0.25 * j);
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Vec2> data;
    int row = 0;
    for (int f = 0; f < disc.mesh().num_faces(); ++f) {
        if (disc.polygon_basis(f))
            continue;
        const auto ev = disc.evaluate(f, params);
        for (std::size_t q = 0; q < params.size(); ++q, ++row) {
            for (int a = 0; a < int(ev.dofs.size()); ++a)
                if (ev.values(q, a) != 0.0)
                    trip.emplace_back(row, ev.dofs[a], ev.values(q, a));
            data.push_back(field(ev.points[q]));
        }
    }
    SparseMatrix A(row, n);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::MatrixXd B(row, comps);
    for (int r = 0; r < row; ++r)
        for (int c = 0; c < comps; ++c)
            B(r, c) = data[r](c);
    const SparseMatrix AtA = A.transpose() * A;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(AtA);
    if (ldlt.info() != Eigen::Success)
        throw Error(ErrorCode::RankDeficient, "field fit is singular");
    const Eigen::MatrixXd X = ldlt.solve(Eigen::MatrixXd(A.transpose() * B));
    Eigen::VectorXd u(n * comps);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < comps; ++c)
            u(j * comps + c) = X(j, c);
    return u;
}

namespace {

std::vector<Vec2> sample_points(const Discretization& disc, int cell)
{
    std::vector<Vec2> pts;
    if (const auto* pb = disc.polygon_basis(cell)) {
        const auto poly = disc.mesh().face_points(cell);
        const Vec2 c = pb->star_center;
        pts.push_back(c);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec2 a = poly[i] - c, b = poly[(i + 1) % poly.size()] - c;
            for (int s = 0; s <= 4; ++s)
                for (int t = 0; s + t <= 4; ++t)
                    if (s + t > 0)
                        pts.push_back(c + 0.25 * s * a + 0.25 * t * b);
        }
        return pts;
    }
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i)
            pts.emplace_back(0.25 * i, 0.25 * j);
    return pts;
}

} // namespace

ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u, const FieldFn& exact, const GradientFn& gradient)
{
    const int comps = disc.components();
    ErrorNorms e;
    double l2 = 0.0, semi = 0.0;
    for (int f = 0; f < disc.mesh().num_faces(); ++f) {
        const auto ev = disc.element_values(f);
        for (std::size_t q = 0; q < ev.weights.size(); ++q) {
            const Vec2 ue = exact(ev.points[q]);
            const Mat2 ge = gradient ? gradient(ev.points[q]) : Mat2::Zero();
            for (int c = 0; c < comps; ++c) {
                double uh = 0.0, gx = 0.0, gy = 0.0;
                for (int a = 0; a < int(ev.dofs.size()); ++a) {
                    const double coef = u(ev.dofs[a] * comps + c);
                    uh += coef * ev.values(q, a);
                    gx += coef * ev.dx(q, a);
                    gy += coef * ev.dy(q, a);
                }
                l2 += ev.weights[q] * (uh - ue(c)) * (uh - ue(c));
                semi += ev.weights[q] * ((gx - ge(c, 0)) * (gx - ge(c, 0)) + (gy - ge(c, 1)) * (gy - ge(c, 1)));
            }
        }
        const auto sp = sample_points(disc, f);
        const auto sv = disc.evaluate(f, sp);
        for (std::size_t q = 0; q < sp.size(); ++q) {
            const Vec2 ue = exact(sv.points[q]);
            for (int c = 0; c < comps; ++c) {
                double uh = 0.0;
                for (int a = 0; a < int(sv.dofs.size()); ++a)
                    uh += u(sv.dofs[a] * comps + c) * sv.values(q, a);
                e.linf = std::max(e.linf, std::abs(uh - ue(c)));
            }
        }
    }
    e.l2 = std::sqrt(l2);
    e.h1_semi = std::sqrt(semi);
    e.h1 = std::sqrt(l2 + semi);
    return e;
}

} // namespace polyspline
