#include "polyspline/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "polyspline/error.hpp"
#include "polyspline/geometry.hpp"

namespace polyspline {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        const double w = 1.0 / ((1.0 - z * z) * pp * pp);
        nodes[i] = 0.5 * (1.0 - z);
        nodes[n - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        nodes[n / 2] = 0.5;
}

QuadratureRule quad_rule_square(int degree)
{
    if (degree < 1)
        degree = 1;
    const int n = (degree + 2) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    QuadratureRule q;
    q.degree = degree;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            q.points.emplace_back(x[i], x[j]);
            q.weights.push_back(w[i] * w[j]);
        }
    return q;
}

QuadratureRule quad_rule_segment(int degree)
{
    const int n = (std::max(degree, 1) + 2) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    QuadratureRule q;
    q.degree = degree;
    for (int i = 0; i < n; ++i) {
        q.points.emplace_back(x[i], 0.0);
        q.weights.push_back(w[i]);
    }
    return q;
}

QuadratureRule quad_rule_triangle(const Vec2& a, const Vec2& b, const Vec2& c, int degree)
{
    // (s, t) in [0,1]^2 -> barycentric (1-s, s(1-t), st); Jacobian s
    const int n = (std::max(degree, 1) + 3) / 2;
    std::vector<double> x, w;
    gauss_legendre(n, x, w);
    const double area2 = geometry::orient(a, b, c);
    QuadratureRule q;
    q.degree = degree;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double s = x[i], t = x[j];
            q.points.push_back((1.0 - s) * a + s * (1.0 - t) * b + s * t * c);
            q.weights.push_back(w[i] * w[j] * s * area2);
        }
    return q;
}

QuadratureRule quad_rule_polygon(std::span<const Vec2> polygon, const Vec2& center, int degree)
{
    QuadratureRule q;
    q.degree = degree;
    const std::size_t n = polygon.size();
    const double scale = geometry::diameter(polygon);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[(i + 1) % n];
        const double o = geometry::orient(center, a, b);
        if (o < -1e-14 * scale * scale)
            throw Error(ErrorCode::NotStarShaped, "quadrature center does not see edge " + std::to_string(i));
        if (o <= 1e-14 * scale * scale)
            continue;
        auto t = quad_rule_triangle(center, a, b, degree);
        q.points.insert(q.points.end(), t.points.begin(), t.points.end());
        q.weights.insert(q.weights.end(), t.weights.begin(), t.weights.end());
    }
    return q;
}

} // namespace polyspline
