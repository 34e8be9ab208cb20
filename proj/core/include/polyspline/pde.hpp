#pragma once

#include <functional>

#include "polyspline/types.hpp"

namespace polyspline {

enum class PdeKind { Poisson, Elasticity };

struct Pde {
    PdeKind kind = PdeKind::Poisson;
    double lambda = 0.0; // Lame parameters, plane strain
    double mu = 0.0;

    int components() const { return kind == PdeKind::Poisson ? 1 : 2; }

    static Pde poisson() { return {}; }
    static Pde elasticity(double young, double poisson_ratio)
    {
        Pde p;
        p.kind = PdeKind::Elasticity;
        p.lambda = young * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
        p.mu = young / (2.0 * (1.0 + poisson_ratio));
        return p;
    }
};

/// Component values of a scalar or 2-vector field; scalar problems use x().
using FieldFn = std::function<Vec2(const Vec2&)>;
/// Row c holds the gradient of component c.
using GradientFn = std::function<Mat2(const Vec2&)>;

/// Boundary value problem -div(sigma(u)) = f (or -lap u = f) with Dirichlet
/// data on every boundary edge not selected by `is_neumann`.
struct ProblemSpec {
    Pde pde;
    FieldFn source;
    FieldFn dirichlet;
    FieldFn neumann;                                    // flux / traction
    std::function<bool(const Vec2& midpoint)> is_neumann; // empty: all Dirichlet
    FieldFn exact;                                      // optional
    GradientFn exact_gradient;                          // optional
};

} // namespace polyspline
