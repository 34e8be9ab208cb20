#pragma once

#include <span>
#include <vector>

#include "polyspline/types.hpp"

namespace polyspline {

struct QuadratureRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    int degree = 0;

    std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Tensor Gauss-Legendre on [0,1]^2 with ceil((degree+1)/2) points per axis.
QuadratureRule quad_rule_square(int degree);

/// Collapsed (Duffy) Gauss rule on the triangle abc, exact to `degree`.
QuadratureRule quad_rule_triangle(const Vec2& a, const Vec2& b, const Vec2& c, int degree);

/// Fan of triangles (center, v_i, v_{i+1}); throws NotStarShaped when a fan
/// triangle is not positively oriented.
QuadratureRule quad_rule_polygon(std::span<const Vec2> polygon, const Vec2& center, int degree);

/// Gauss rule on [0, 1] (points stored in x, y = 0).
QuadratureRule quad_rule_segment(int degree);

} // namespace polyspline
