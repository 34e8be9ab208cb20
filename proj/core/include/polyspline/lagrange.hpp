#pragma once

#include <Eigen/Dense>

namespace polyspline {

/// Values and parametric gradients of the tensor-product Lagrange functions of
/// the given order (1 or 2) at (u, v). Function i + (order+1)*j belongs to the
/// node (i/order, j/order). Gradients are stored as columns.
struct LagrangeEval {
    Eigen::VectorXd values;
    Eigen::Matrix2Xd grads;
};

LagrangeEval lagrange_basis(int order, double u, double v);

/// 1D factors: order 1 gives alpha_1 = 1 - t, alpha_2 = t; order 2 gives
/// theta_1 = (1-t)(1-2t), theta_2 = 4t(1-t), theta_3 = t(2t-1).
double lagrange_1d(int order, int i, double t);
double lagrange_1d_deriv(int order, int i, double t);

} // namespace polyspline
