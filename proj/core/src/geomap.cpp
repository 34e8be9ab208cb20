#include "polyspline/geomap.hpp"

#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "polyspline/error.hpp"
#include "polyspline/lagrange.hpp"

namespace polyspline {

Eigen::Matrix2Xd GeoMapEval::push_gradients(const Eigen::Matrix2Xd& grads) const
{
    return jac.transpose().partialPivLu().solve(grads);
}

Vec2 GeoMap::map(int cell, const Vec2& xhat) const
{
    switch (kinds_[cell]) {
    case MapKind::Identity: return xhat;
    case MapKind::Lagrange: return nodes_[cell] * lagrange_basis(2, xhat.x(), xhat.y()).values;
    case MapKind::Spline: {
        Eigen::VectorXd v;
        Eigen::Matrix2Xd g;
        const auto& eb = spline_[cell];
        eb.eval_global(xhat.x(), xhat.y(), v, g);
        Vec2 x = Vec2::Zero();
        for (int c = 0; c < v.size(); ++c)
            x += v(c) * control_[eb.dofs[c]];
        return x;
    }
    }
    return xhat;
}

Mat2 GeoMap::jacobian(int cell, const Vec2& xhat) const
{
    switch (kinds_[cell]) {
    case MapKind::Identity: return Mat2::Identity();
    case MapKind::Lagrange: return nodes_[cell] * lagrange_basis(2, xhat.x(), xhat.y()).grads.transpose();
    case MapKind::Spline: {
        Eigen::VectorXd v;
        Eigen::Matrix2Xd g;
        const auto& eb = spline_[cell];
        eb.eval_global(xhat.x(), xhat.y(), v, g);
        Mat2 j = Mat2::Zero();
        for (int c = 0; c < v.size(); ++c)
            j += control_[eb.dofs[c]] * g.col(c).transpose();
        return j;
    }
    }
    return Mat2::Identity();
}

GeoMapEval GeoMap::eval(int cell, const Vec2& xhat) const
{
    GeoMapEval e;
    e.x = map(cell, xhat);
    e.jac = jacobian(cell, xhat);
    e.det = e.jac.determinant();
    if (std::abs(e.det) < 1e-14)
        throw Error(ErrorCode::DegenerateJacobian, "cell " + std::to_string(cell) + " has a singular Jacobian");
    const Mat2 inv = e.jac.inverse();
    e.metric = inv * inv.transpose();
    return e;
}

namespace {

Eigen::Matrix<double, 2, 9> bilinear_nodes(const PolyMesh& m, int f)
{
    const auto q = m.face(f);
    Eigen::Matrix<double, 2, 9> n;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const double u = 0.5 * i, v = 0.5 * j;
            n.col(i + 3 * j) = (1 - u) * (1 - v) * m.vertex(q[0]) + u * (1 - v) * m.vertex(q[1]) + u * v * m.vertex(q[2]) +
                               (1 - u) * v * m.vertex(q[3]);
        }
    return n;
}

} // namespace

GeoMap GeoMap::bilinear(const PolyMesh& mesh)
{
    GeoMap g;
    g.kinds_.assign(mesh.num_faces(), MapKind::Identity);
    g.nodes_.resize(mesh.num_faces());
    g.spline_.resize(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f)
        if (mesh.is_quad(f)) {
            g.kinds_[f] = MapKind::Lagrange;
            g.nodes_[f] = bilinear_nodes(mesh, f);
        }
    return g;
}

GeoMap fit_geometric_map(const PolyMesh& m, const CellClass& classes, const BasisSet& bases)
{
    GeoMap g;
    const int nf = m.num_faces();
    g.kinds_.assign(nf, MapKind::Identity);
    g.nodes_.resize(nf);
    g.spline_.resize(nf);
    g.control_.assign(bases.num_dofs(), Vec2::Zero());
    for (int d = 0; d < bases.num_dofs(); ++d)
        g.control_[d] = bases.table[d].anchor;

    // vertex interpolation conditions on the spline region
    std::vector<int> cond_vertex;
    std::vector<char> seen(m.num_vertices(), 0);
    std::vector<Eigen::Triplet<double>> trip;
    for (int f = 0; f < nf; ++f) {
        if (classes[f] != CellTag::SplineCompatible)
            continue;
        const auto& eb = bases.elements[f];
        g.kinds_[f] = MapKind::Spline;
        g.spline_[f] = eb;
        for (int k = 0; k < 4; ++k) {
            const int v = m.face(f)[k];
            if (seen[v])
                continue;
            seen[v] = 1;
            Eigen::VectorXd val;
            Eigen::Matrix2Xd grad;
            const Vec2 c = quad_corner(k);
            eb.eval_global(c.x(), c.y(), val, grad);
            const int row = int(cond_vertex.size());
            for (int i = 0; i < val.size(); ++i)
                if (std::abs(val(i)) > 1e-15)
                    trip.emplace_back(row, eb.dofs[i], val(i));
            cond_vertex.push_back(v);
        }
    }
    const int nc = int(cond_vertex.size());
    if (nc > 0) {
        Eigen::SparseMatrix<double> A(nc, bases.num_dofs());
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::MatrixXd X0(bases.num_dofs(), 2), B(nc, 2);
        for (int d = 0; d < bases.num_dofs(); ++d)
            X0.row(d) = g.control_[d].transpose();
        for (int r = 0; r < nc; ++r)
            B.row(r) = m.vertex(cond_vertex[r]).transpose();
        const Eigen::MatrixXd R = B - A * X0;
        const double scale = std::max(m.max_edge_length(), 1e-300);
        if (R.cwiseAbs().maxCoeff() > 1e-13 * scale) {
            Eigen::SparseMatrix<double> AAt = A * A.transpose();
            for (int r = 0; r < nc; ++r)
                AAt.coeffRef(r, r) += 1e-12;
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(AAt);
            if (ldlt.info() != Eigen::Success)
                throw Error(ErrorCode::SingularFit, "geometric map normal equations could not be factored");
            const Eigen::MatrixXd Y = ldlt.solve(R);
            const Eigen::MatrixXd X = X0 + A.transpose() * Y;
            const double res = (B - A * X).cwiseAbs().maxCoeff();
            if (res > 1e-8 * scale)
                throw Error(ErrorCode::SingularFit, "vertex interpolation residual " + std::to_string(res));
            for (int d = 0; d < bases.num_dofs(); ++d)
                g.control_[d] = X.row(d).transpose();
        }
    }

    for (int f = 0; f < nf; ++f) {
        if (classes[f] != CellTag::Q2Quad)
            continue;
        g.kinds_[f] = MapKind::Lagrange;
        g.nodes_[f] = bilinear_nodes(m, f);
        const auto& eb = bases.elements[f];
        if (eb.kind != ElementKind::Lagrange2)
            continue;
        // nodes tied to spline dofs follow the spline map
        for (int r = 0; r < 9; ++r) {
            bool tied = false;
            Vec2 x = Vec2::Zero();
            for (int c = 0; c < int(eb.dofs.size()); ++c) {
                if (eb.l2g(r, c) == 0.0)
                    continue;
                const auto kind = bases.table[eb.dofs[c]].kind;
                if (kind == DofKind::SplineCell || kind == DofKind::SplineEdge || kind == DofKind::SplineVertex)
                    tied = true;
                x += eb.l2g(r, c) * g.control_[eb.dofs[c]];
            }
            if (tied)
                g.nodes_[f].col(r) = x;
        }
    }
    return g;
}

GeoMapReport validate_geomap(const PolyMesh& mesh, const GeoMap& geomap, const QuadratureRule& rule)
{
    GeoMapReport rep;
    rep.min_det = std::numeric_limits<double>::infinity();
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (geomap.kind(f) == MapKind::Identity)
            continue;
        bool bad = false;
        for (const auto& p : rule.points) {
            const double d = geomap.jacobian(f, p).determinant();
            rep.min_det = std::min(rep.min_det, d);
            bad = bad || d <= 0.0;
        }
        if (bad)
            rep.flagged.push_back(f);
    }
    return rep;
}

} // namespace polyspline
