#include "polyspline/franke.hpp"

#include <cmath>
#include <numbers>

namespace polyspline {

namespace {

// Each term is c*exp(E) with E quadratic in (x, y).
struct Term {
    double c;
    double E;
    Vec2 dE;
    Mat2 ddE;
};

void terms(const Vec2& p, Term out[4])
{
    const double X = 9 * p.x(), Y = 9 * p.y();
    out[0] = {0.75, -((X - 2) * (X - 2) + (Y - 2) * (Y - 2)) / 4, Vec2(-9 * (X - 2) / 2, -9 * (Y - 2) / 2),
              Mat2{{-81.0 / 2, 0}, {0, -81.0 / 2}}};
    out[1] = {0.75, -(X + 1) * (X + 1) / 49 - (Y + 1) / 10, Vec2(-18 * (X + 1) / 49, -0.9),
              Mat2{{-162.0 / 49, 0}, {0, 0}}};
    out[2] = {0.5, -((X - 7) * (X - 7) + (Y - 3) * (Y - 3)) / 4, Vec2(-9 * (X - 7) / 2, -9 * (Y - 3) / 2),
              Mat2{{-81.0 / 2, 0}, {0, -81.0 / 2}}};
    out[3] = {-0.2, -(X - 4) * (X - 4) - (Y - 7) * (Y - 7), Vec2(-18 * (X - 4), -18 * (Y - 7)),
              Mat2{{-162.0, 0}, {0, -162.0}}};
}

} // namespace

double franke(const Vec2& x)
{
    Term t[4];
    terms(x, t);
    double s = 0.0;
    for (const auto& k : t)
        s += k.c * std::exp(k.E);
    return s;
}

Vec2 franke_gradient(const Vec2& x)
{
    Term t[4];
    terms(x, t);
    Vec2 g = Vec2::Zero();
    for (const auto& k : t)
        g += k.c * std::exp(k.E) * k.dE;
    return g;
}

Mat2 franke_hessian(const Vec2& x)
{
    Term t[4];
    terms(x, t);
    Mat2 H = Mat2::Zero();
    for (const auto& k : t)
        H += k.c * std::exp(k.E) * (k.dE * k.dE.transpose() + k.ddE);
    return H;
}

double franke_laplacian(const Vec2& x) { return franke_hessian(x).trace(); }

ProblemSpec franke_poisson_problem()
{
    ProblemSpec p;
    p.pde = Pde::poisson();
    p.source = [](const Vec2& x) { return Vec2(-franke_laplacian(x), 0.0); };
    p.dirichlet = [](const Vec2& x) { return Vec2(franke(x), 0.0); };
    p.exact = p.dirichlet;
    p.exact_gradient = [](const Vec2& x) {
        Mat2 G = Mat2::Zero();
        G.row(0) = franke_gradient(x).transpose();
        return G;
    };
    return p;
}

namespace {

// u1 = sin(pi x) sin(pi y), u2 = cos(pi x) sin(pi y)
struct Trig {
    Vec2 u;
    Mat2 grad;    // row = component
    Mat2 hess[2]; // per component
};

Trig trig_field(const Vec2& p)
{
    constexpr double pi = std::numbers::pi;
    const double sx = std::sin(pi * p.x()), cx = std::cos(pi * p.x());
    const double sy = std::sin(pi * p.y()), cy = std::cos(pi * p.y());
    Trig t;
    t.u = Vec2(sx * sy, cx * sy);
    t.grad << pi * cx * sy, pi * sx * cy, -pi * sx * sy, pi * cx * cy;
    t.hess[0] << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
    t.hess[1] << -pi * pi * cx * sy, -pi * pi * sx * cy, -pi * pi * sx * cy, -pi * pi * cx * sy;
    return t;
}

} // namespace

ProblemSpec manufactured_elasticity_problem(const Pde& pde)
{
    ProblemSpec p;
    p.pde = pde;
    const double lam = pde.lambda, mu = pde.mu;
    p.source = [lam, mu](const Vec2& x) {
        const Trig t = trig_field(x);
        // grad(div u)_i = sum_j d_i d_j u_j
        const Vec2 grad_div(t.hess[0](0, 0) + t.hess[1](0, 1), t.hess[0](1, 0) + t.hess[1](1, 1));
        const Vec2 lap(t.hess[0].trace(), t.hess[1].trace());
        return Vec2(-(mu * lap + (lam + mu) * grad_div));
    };
    p.dirichlet = [](const Vec2& x) { return trig_field(x).u; };
    p.exact = p.dirichlet;
    p.exact_gradient = [](const Vec2& x) { return trig_field(x).grad; };
    return p;
}

ProblemSpec rigid_translation_problem(const Pde& pde, const Vec2& shift)
{
    ProblemSpec p;
    p.pde = pde;
    p.source = [](const Vec2&) { return Vec2::Zero(); };
    p.dirichlet = [shift](const Vec2&) { return shift; };
    p.exact = p.dirichlet;
    p.exact_gradient = [](const Vec2&) { return Mat2::Zero(); };
    return p;
}

} // namespace polyspline
