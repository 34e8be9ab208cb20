#include "polyspline/lagrange.hpp"

#include "polyspline/error.hpp"

namespace polyspline {

double lagrange_1d(int order, int i, double t)
{
    if (order == 1)
        return i == 0 ? 1.0 - t : t;
    switch (i) {
    case 0: return (1.0 - t) * (1.0 - 2.0 * t);
    case 1: return 4.0 * t * (1.0 - t);
    default: return t * (2.0 * t - 1.0);
    }
}

double lagrange_1d_deriv(int order, int i, double t)
{
    if (order == 1)
        return i == 0 ? -1.0 : 1.0;
    switch (i) {
    case 0: return 4.0 * t - 3.0;
    case 1: return 4.0 - 8.0 * t;
    default: return 4.0 * t - 1.0;
    }
}

LagrangeEval lagrange_basis(int order, double u, double v)
{
    if (order != 1 && order != 2)
        throw Error(ErrorCode::InvalidConfig, "Lagrange order must be 1 or 2");
    const int n = order + 1;
    LagrangeEval out;
    out.values.resize(n * n);
    out.grads.resize(2, n * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double a = lagrange_1d(order, i, u), da = lagrange_1d_deriv(order, i, u);
            const double b = lagrange_1d(order, j, v), db = lagrange_1d_deriv(order, j, v);
            out.values(i + n * j) = a * b;
            out.grads.col(i + n * j) << da * b, a * db;
        }
    return out;
}

} // namespace polyspline
