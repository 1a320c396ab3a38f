#pragma once

#include <Eigen/Dense>
#include <utility>

namespace mgp {

/// Nodes and weights of n-point Gauss-Hermite quadrature for
/// integral f(x) e^{-x^2} dx, via the Golub-Welsch eigendecomposition
/// of the Jacobi matrix. Weights sum to sqrt(pi).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n);

}  // namespace mgp
