#include "polyspline/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace polyspline::geometry {

double signed_area(std::span<const Vec2> polygon)
{
    double a = 0.0;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = polygon[i];
        const Vec2& q = polygon[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

Vec2 area_centroid(std::span<const Vec2> polygon)
{
    const std::size_t n = polygon.size();
    // shift to the first vertex to limit cancellation
    const Vec2 o = polygon[0];
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = polygon[i] - o;
        const Vec2 q = polygon[(i + 1) % n] - o;
        const double cr = p.x() * q.y() - q.x() * p.y();
        a += cr;
        c += cr * (p + q);
    }
    if (std::abs(a) < 1e-300)
        return vertex_average(polygon);
    return o + c / (3.0 * a);
}

Vec2 vertex_average(std::span<const Vec2> polygon)
{
    Vec2 c = Vec2::Zero();
    for (const auto& p : polygon)
        c += p;
    return c / double(polygon.size());
}

double diameter(std::span<const Vec2> polygon)
{
    double d = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        for (std::size_t j = i + 1; j < polygon.size(); ++j)
            d = std::max(d, (polygon[i] - polygon[j]).norm());
    return d;
}

double perimeter(std::span<const Vec2> polygon)
{
    double l = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i)
        l += (polygon[(i + 1) % polygon.size()] - polygon[i]).norm();
    return l;
}

bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p)
{
    const double scale = std::max(diameter(polygon), 1e-300);
    if (distance_to_boundary(polygon, p) <= 1e-12 * scale)
        return false;
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = polygon[i];
        const Vec2& b = polygon[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                inside = !inside;
        }
    }
    return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    double t = len2 > 0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (a + t * d - p).norm();
}

double distance_to_boundary(std::span<const Vec2> polygon, const Vec2& p)
{
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < polygon.size(); ++i)
        d = std::min(d, point_segment_distance(p, polygon[i], polygon[(i + 1) % polygon.size()]));
    return d;
}

bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1, double eps)
{
    const double scale = std::max({(p1 - p0).norm(), (q1 - q0).norm(), 1e-300});
    const double tol = eps * scale * scale;
    const double d1 = orient(q0, q1, p0);
    const double d2 = orient(q0, q1, p1);
    const double d3 = orient(p0, p1, q0);
    const double d4 = orient(p0, p1, q1);
    return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

std::vector<Vec2> clip_left_of(std::span<const Vec2> polygon, const Vec2& a, const Vec2& b, double eps)
{
    std::vector<Vec2> out;
    const std::size_t n = polygon.size();
    if (n == 0)
        return out;
    const Vec2 d = b - a;
    const double len = d.norm();
    auto side = [&](const Vec2& p) { return (d.x() * (p.y() - a.y()) - d.y() * (p.x() - a.x())) / len; };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& cur = polygon[i];
        const Vec2& nxt = polygon[(i + 1) % n];
        const double sc = side(cur);
        const double sn = side(nxt);
        const bool in_c = sc >= -eps;
        const bool in_n = sn >= -eps;
        if (in_c)
            out.push_back(cur);
        if (in_c != in_n) {
            const double t = sc / (sc - sn);
            out.push_back(cur + t * (nxt - cur));
        }
    }
    // drop consecutive duplicates produced by vertices lying on the line
    std::vector<Vec2> clean;
    for (const auto& p : out)
        if (clean.empty() || (p - clean.back()).norm() > eps)
            clean.push_back(p);
    while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= eps)
        clean.pop_back();
    return clean;
}

} // namespace polyspline::geometry
