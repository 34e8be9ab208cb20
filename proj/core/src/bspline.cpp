#include "polyspline/bspline.hpp"

namespace polyspline {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Cox-de Boor for one quadratic function whose degree-0 indicator is active on
// knot interval `span` (0..2), or no interval when span < 0.
std::pair<double, double> cox_de_boor(const std::array<double, 4>& k, int span, double t)
{
    if (span < 0)
        return {0.0, 0.0};
    double n0[3] = {0, 0, 0};
    n0[span] = 1.0;
    double n1[2];
    for (int i = 0; i < 2; ++i)
        n1[i] = ratio(t - k[i], k[i + 1] - k[i]) * n0[i] + ratio(k[i + 2] - t, k[i + 2] - k[i + 1]) * n0[i + 1];
    const double value = ratio(t - k[0], k[2] - k[0]) * n1[0] + ratio(k[3] - t, k[3] - k[1]) * n1[1];
    const double deriv = 2.0 * (ratio(n1[0], k[2] - k[0]) - ratio(n1[1], k[3] - k[1]));
    return {value, deriv};
}

} // namespace

std::pair<double, double> bspline_quad_eval(const SplineBasis1D& basis, double t)
{
    const auto& kv = basis.knots;
    const int i = basis.index;
    if (i < 0 || i + 3 >= int(kv.size()))
        return {0.0, 0.0};
    const std::array<double, 4> k{kv[i], kv[i + 1], kv[i + 2], kv[i + 3]};
    const double last = kv.back();
    int span = -1;
    if (t == last) {
        for (int s = 2; s >= 0; --s)
            if (k[s] < k[s + 1] && k[s + 1] == t) {
                span = s;
                break;
            }
    } else {
        for (int s = 0; s < 3; ++s)
            if (k[s] <= t && t < k[s + 1])
                span = s;
    }
    return cox_de_boor(k, span, t);
}

std::pair<double, double> bspline_quad_eval_span(const std::array<double, 4>& knots, double t, double lo, double hi)
{
    int span = -1;
    for (int s = 0; s < 3; ++s)
        if (knots[s] == lo && knots[s + 1] == hi)
            span = s;
    return cox_de_boor(knots, span, t);
}

} // namespace polyspline
