#pragma once

#include "polyspline/pde.hpp"
#include "polyspline/types.hpp"

namespace polyspline {

/// Franke's 2D test function.
double franke(const Vec2& x);
Vec2 franke_gradient(const Vec2& x);
double franke_laplacian(const Vec2& x);
Mat2 franke_hessian(const Vec2& x);

/// -lap u = f, Dirichlet everywhere, exact solution Franke.
ProblemSpec franke_poisson_problem();

/// Smooth trigonometric displacement field and its body force for plane
/// strain elasticity; Dirichlet everywhere.
ProblemSpec manufactured_elasticity_problem(const Pde& pde);

/// Constant displacement with zero load.
ProblemSpec rigid_translation_problem(const Pde& pde, const Vec2& shift);

} // namespace polyspline
