#pragma once

#include <utility>
#include <vector>

#include "mgp/rng.hpp"
#include "mgp/tensor.hpp"

namespace mgp {

/// Fully-connected rectifier network with two linear output heads: one for
/// a Gaussian mean, one pre-positivity for its variance.
class MlpFunction {
 public:
  enum class Positivity { kSoftplus, kScaledSigmoid };

  std::vector<Tensor> weights;  // trunk, layer l: in_l x out_l
  std::vector<Tensor> biases;   // 1 x out_l
  Tensor w_mean, b_mean;
  Tensor w_var, b_var;
  int in_dim = 0, out_dim = 0;

  static MlpFunction create(int in_dim, const std::vector<int>& hidden,
                            int out_dim, RngState& rng);

  /// Hidden representation after the rectifier stack (identity when the
  /// network has no hidden layers).
  Tensor trunk(const Tensor& x) const;

  /// (mean, variance), both n x out_dim. Softplus head ignores nu0;
  /// the scaled-sigmoid head returns nu0 * sigmoid(.) in (0, nu0).
  std::pair<Tensor, Tensor> gaussian_head(const Tensor& x, Positivity pos,
                                          const Tensor& nu0 = Tensor()) const;

  std::vector<Tensor> parameters() const;
};

}  // namespace mgp
