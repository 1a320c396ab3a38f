#include "mgp/gauss_hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace mgp {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Eigen::VectorXd nodes = es.eigenvalues();
  Eigen::VectorXd weights(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int k = 0; k < n; ++k) {
    double v0 = es.eigenvectors()(0, k);
    weights(k) = sqrt_pi * v0 * v0;
  }
  return {nodes, weights};
}

}  // namespace mgp
