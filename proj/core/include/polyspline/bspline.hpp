#pragma once

#include <array>
#include <utility>
#include <vector>

namespace polyspline {

/// Quadratic B-spline number `index` of a knot vector; it uses the four knots
/// knots[index .. index+3].
struct SplineBasis1D {
    std::vector<double> knots;
    int index = 0;
};

/// Value and derivative (Cox-de Boor). At the right end of a knot vector the
/// left limit is taken; outside the support both are zero.
std::pair<double, double> bspline_quad_eval(const SplineBasis1D& basis, double t);

/// Same, for the four knots of one function with the active knot span fixed
/// to [lo, hi] (which must be one of its knot intervals). Element evaluation
/// uses this so that values at span ends are the one-sided limits.
std::pair<double, double> bspline_quad_eval_span(const std::array<double, 4>& knots, double t, double lo, double hi);

} // namespace polyspline
