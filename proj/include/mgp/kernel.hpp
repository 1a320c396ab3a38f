#pragma once

#include "mgp/tensor.hpp"

namespace mgp {

/// Squared-exponential kernel with per-dimension lengthscales (ARD):
/// k(x,x') = sv * exp(-0.5 * sum_k (x_k - x'_k)^2 / ls_k^2).
/// Parameters live in log-space so positivity needs no constraints.
struct SeArdKernel {
  Tensor log_lengthscales;     // d x 1
  Tensor log_signal_variance;  // 1 x 1
  int input_dim = 0;

  static SeArdKernel create(int input_dim, double lengthscale = 1.0,
                            double signal_variance = 1.0);

  Tensor signal_variance() const { return exp(log_signal_variance); }

  /// n x m cross-covariance matrix; differentiable w.r.t. the inputs too.
  Tensor gram(const Tensor& a, const Tensor& b) const;

  /// Diagonal of gram(a, a): constant sv per row, as an n x 1 tensor.
  Tensor gram_diag(const Tensor& a) const;
};

}  // namespace mgp
