#include <algorithm>
#include "polyspline/poly_basis.hpp"

#include <cmath>
#include <string>

#include "polyspline/error.hpp"
#include "polyspline/geometry.hpp"

namespace polyspline {

KernelEval eval_kernel(KernelType type, const Vec2& x, const Vec2& z)
{
    const Vec2 d = x - z;
    const double r2 = d.squaredNorm();
    if (type == KernelType::Log)
        return {0.5 * std::log(r2), d / r2, 0.0};
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    return {1.0 / r, -d / r3, 1.0 / r3};
}

void MonomialFrame::eval(const Vec2& x, double* v, Vec2* g) const
{
    const double X = (x.x() - origin.x()) / scale, Y = (x.y() - origin.y()) / scale;
    const double s = 1.0 / scale;
    v[0] = 1.0;
    v[1] = X;
    v[2] = Y;
    v[3] = X * Y;
    v[4] = X * X;
    v[5] = Y * Y;
    if (!g)
        return;
    g[0] = Vec2::Zero();
    g[1] = Vec2(s, 0);
    g[2] = Vec2(0, s);
    g[3] = Vec2(Y * s, X * s);
    g[4] = Vec2(2 * X * s, 0);
    g[5] = Vec2(0, 2 * Y * s);
}

std::vector<Vec2> place_kernel_centers(std::span<const Vec2> poly, int per_vertex, double offset_factor)
{
    const int n = int(poly.size());
    per_vertex = std::max(per_vertex, 1);
    auto outward = [&](int k) {
        const Vec2 e = poly[(k + 1) % n] - poly[k];
        return Vec2(e.y(), -e.x()).normalized();
    };
    auto len = [&](int k) { return (poly[(k + 1) % n] - poly[k]).norm(); };
    std::vector<Vec2> centers;
    for (int k = 0; k < n; ++k) {
        for (int s = 0; s < per_vertex; ++s) {
            Vec2 base, dir;
            double h;
            if (s == 0) {
                base = poly[k];
                dir = outward((k + n - 1) % n) + outward(k);
                if (dir.norm() < 1e-12)
                    dir = outward(k);
                dir.normalize();
                h = 0.5 * (len((k + n - 1) % n) + len(k));
            } else {
                const double t = double(s) / per_vertex;
                base = (1 - t) * poly[k] + t * poly[(k + 1) % n];
                dir = outward(k);
                h = len(k);
            }
            bool placed = false;
            for (int attempt = 0; attempt < 2 && !placed; ++attempt) {
                const double off = offset_factor * h * (attempt == 0 ? 1.0 : 2.0);
                const Vec2 z = base + off * dir;
                if (!geometry::point_in_polygon(poly, z) && geometry::distance_to_boundary(poly, z) > 0.25 * off) {
                    // centers from both sides of a reflex notch may coincide
                    const bool dup = std::any_of(centers.begin(), centers.end(),
                                                 [&](const Vec2& c) { return (c - z).norm() < 0.25 * off; });
                    if (!dup)
                        centers.push_back(z);
                    placed = true;
                }
            }
            if (!placed)
                throw Error(ErrorCode::CenterInsidePolygon, "kernel center at polygon vertex " + std::to_string(k) + " falls inside");
        }
    }
    return centers;
}

std::vector<CollocationPoint> sample_collocation(std::span<const Vec2> poly, int samples_per_edge)
{
    const int n = int(poly.size());
    const int m = std::max(samples_per_edge, 2);
    std::vector<CollocationPoint> pts;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < m - 1; ++i) {
            const double t = double(i) / (m - 1);
            pts.push_back({(1 - t) * poly[k] + t * poly[(k + 1) % n], k, t});
        }
    return pts;
}

std::vector<AffineField> constraint_fields(const Pde& pde, ConstraintMode mode, const MonomialFrame& frame)
{
    if (mode == ConstraintMode::None)
        return {};
    // gradients of X, Y, XY, X^2, Y^2 as affine fields in physical x
    const double s = 1.0 / frame.scale;
    const Vec2 o = frame.origin;
    std::vector<std::pair<Vec2, Mat2>> grads; // grad q = c + L x
    auto add = [&](const Mat2& L, const Vec2& at_origin) { grads.emplace_back(at_origin - L * o, L); };
    add(Mat2::Zero(), Vec2(s, 0));
    add(Mat2::Zero(), Vec2(0, s));
    if (mode == ConstraintMode::Quadratic) {
        Mat2 L;
        L << 0, s * s, s * s, 0;
        add(L, Vec2::Zero());
        L << 2 * s * s, 0, 0, 0;
        add(L, Vec2::Zero());
        L << 0, 0, 0, 2 * s * s;
        add(L, Vec2::Zero());
    }

    std::vector<AffineField> raw;
    if (pde.kind == PdeKind::Poisson) {
        for (const auto& [c, L] : grads)
            raw.push_back({c, L});
    } else {
        // row beta of sigma(q e_alpha):
        //   lambda d_alpha q e_beta + mu (delta_ab grad q + d_beta q e_alpha)
        const double lam = pde.lambda, mu = pde.mu;
        for (const auto& [c, L] : grads)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    AffineField f;
                    const Vec2 eb = Vec2::Unit(b), ea = Vec2::Unit(a);
                    f.c = lam * c(a) * eb + mu * ((a == b ? 1.0 : 0.0) * c + c(b) * ea);
                    f.L = lam * eb * L.row(a) + mu * ((a == b ? 1.0 : 0.0) * L + ea * L.row(b));
                    raw.push_back(f);
                }
    }
    // keep a linearly independent subset (the fields live in a 6-dim space)
    Eigen::MatrixXd M(6, raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double sc = 1.0 / std::max({raw[i].c.norm(), raw[i].L.norm() * frame.scale, 1e-300});
        M.col(i) << raw[i].c * sc, (raw[i].L * frame.scale * sc).reshaped();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    qr.setThreshold(1e-10);
    const int rank = int(qr.rank());
    std::vector<AffineField> out;
    for (int i = 0; i < rank; ++i)
        out.push_back(raw[qr.colsPermutation().indices()(i)]);
    return out;
}

Eigen::MatrixXd constraint_rows(std::span<const AffineField> fields, std::span<const Vec2> centers, KernelType kernel,
                                const MonomialFrame& frame, const QuadratureRule& quad)
{
    const int k = int(centers.size());
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(fields.size(), k + MonomialFrame::size);
    double mv[MonomialFrame::size];
    Vec2 mg[MonomialFrame::size];
    for (std::size_t q = 0; q < quad.size(); ++q) {
        const Vec2& x = quad.points[q];
        const double w = quad.weights[q];
        frame.eval(x, mv, mg);
        for (std::size_t r = 0; r < fields.size(); ++r) {
            const Vec2 S = fields[r].at(x);
            const double dv = fields[r].div();
            for (int i = 0; i < k; ++i) {
                const auto ke = eval_kernel(kernel, x, centers[i]);
                C(r, i) += w * (dv * ke.value + S.dot(ke.grad));
            }
            for (int d = 0; d < MonomialFrame::size; ++d)
                C(r, k + d) += w * (dv * mv[d] + S.dot(mg[d]));
        }
    }
    return C;
}

Eigen::MatrixXd collocation_matrix(std::span<const CollocationPoint> points, std::span<const Vec2> centers, KernelType kernel,
                                   const MonomialFrame& frame)
{
    const int k = int(centers.size());
    Eigen::MatrixXd A(points.size(), k + MonomialFrame::size);
    double mv[MonomialFrame::size];
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int i = 0; i < k; ++i)
            A(p, i) = eval_kernel(kernel, points[p].x, centers[i]).value;
        frame.eval(points[p].x, mv, nullptr);
        for (int d = 0; d < MonomialFrame::size; ++d)
            A(p, k + d) = mv[d];
    }
    return A;
}

Eigen::MatrixXd solve_constrained_lsq(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                                      const Eigen::MatrixXd& Cr, double* rcond, double ridge, int ridge_cols)
{
    const int s = int(A.rows()), n = int(A.cols()), r = int(C.rows());
    if (r > n)
        throw Error(ErrorCode::InfeasibleConstraints, std::to_string(r) + " constraints for " + std::to_string(n) + " unknowns");
    Eigen::VectorXd D(n);
    for (int j = 0; j < n; ++j) {
        const double nrm = A.col(j).norm();
        D(j) = nrm > 0 ? 1.0 / nrm : 1.0;
    }
    const Eigen::MatrixXd As = A * D.asDiagonal();
    Eigen::MatrixXd Cs = C * D.asDiagonal();
    Eigen::VectorXd R(r);
    for (int i = 0; i < r; ++i) {
        const double nrm = Cs.row(i).norm();
        R(i) = nrm > 0 ? 1.0 / nrm : 1.0;
    }
    Cs = R.asDiagonal() * Cs;

    const int N = s + n + r;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
    K.topLeftCorner(s, s).setIdentity();
    K.block(0, s, s, n) = As;
    K.block(s, 0, n, s) = As.transpose();
    for (int j = 0; j < std::min(ridge_cols, n); ++j)
        K(s + j, s + j) = -ridge;
    K.block(s, s + n, n, r) = Cs.transpose();
    K.block(s + n, s, r, n) = Cs;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(N, B.cols());
    rhs.topRows(s) = B;
    rhs.bottomRows(r) = R.asDiagonal() * Cr;

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
    const double rc = lu.rcond();
    if (rcond)
        *rcond = rc;
    if (!(rc > 1e-14))
        throw Error(ErrorCode::RankDeficient, "constrained fit is numerically singular (rcond " + std::to_string(rc) + ")");
    const Eigen::MatrixXd sol = lu.solve(rhs);
    return D.asDiagonal() * sol.middleRows(s, n);
}

void PolygonBasis::features(const Vec2& x, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const
{
    const int k = num_centers();
    values.resize(k + MonomialFrame::size);
    grads.resize(2, k + MonomialFrame::size);
    for (int i = 0; i < k; ++i) {
        const auto ke = eval_kernel(kernel, x, centers[i]);
        values(i) = ke.value;
        grads.col(i) = ke.grad;
    }
    double mv[MonomialFrame::size];
    Vec2 mg[MonomialFrame::size];
    frame.eval(x, mv, mg);
    for (int d = 0; d < MonomialFrame::size; ++d) {
        values(k + d) = mv[d];
        grads.col(k + d) = mg[d];
    }
}

void PolygonBasis::eval(const Vec2& x, Eigen::VectorXd& values, Eigen::Matrix2Xd& grads) const
{
    Eigen::VectorXd fv;
    Eigen::Matrix2Xd fg;
    features(x, fv, fg);
    values = coeffs.transpose() * fv;
    grads = fg * coeffs;
}

} // namespace polyspline
