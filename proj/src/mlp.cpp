#include "mgp/mlp.hpp"

#include <cmath>

namespace mgp {

namespace {
// Zero-mean uniform with fan-in scaling, biases zero.
Tensor init_weight(int fan_in, int fan_out, RngState& rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix w = rng.uniform_matrix(fan_in, fan_out);
  w = ((2.0 * w.array() - 1.0) * bound).matrix();
  return Tensor::parameter(w);
}
}  // namespace

MlpFunction MlpFunction::create(int in_dim, const std::vector<int>& hidden,
                                int out_dim, RngState& rng) {
  MlpFunction net;
  net.in_dim = in_dim;
  net.out_dim = out_dim;
  int prev = in_dim;
  for (int width : hidden) {
    net.weights.push_back(init_weight(prev, width, rng));
    net.biases.push_back(Tensor::parameter(Matrix(Matrix::Zero(1, width))));
    prev = width;
  }
  net.w_mean = init_weight(prev, out_dim, rng);
  net.b_mean = Tensor::parameter(Matrix(Matrix::Zero(1, out_dim)));
  net.w_var = init_weight(prev, out_dim, rng);
  net.b_var = Tensor::parameter(Matrix(Matrix::Zero(1, out_dim)));
  return net;
}

Tensor MlpFunction::trunk(const Tensor& x) const {
  if (x.cols() != in_dim) throw DimensionMismatch("MlpFunction: input width");
  Tensor h = x;
  for (size_t l = 0; l < weights.size(); ++l) {
    h = relu(add_rowvec(matmul(h, weights[l]), biases[l]));
  }
  return h;
}

std::pair<Tensor, Tensor> MlpFunction::gaussian_head(const Tensor& x,
                                                     Positivity pos,
                                                     const Tensor& nu0) const {
  Tensor h = trunk(x);
  Tensor mean = add_rowvec(matmul(h, w_mean), b_mean);
  Tensor raw = add_rowvec(matmul(h, w_var), b_var);
  Tensor var;
  if (pos == Positivity::kSoftplus) {
    var = softplus(raw);
  } else {
    if (!nu0.defined()) throw Error("scaled-sigmoid head needs nu0");
    var = mul(sigmoid(raw), nu0);
  }
  return {mean, var};
}

std::vector<Tensor> MlpFunction::parameters() const {
  std::vector<Tensor> ps;
  for (size_t l = 0; l < weights.size(); ++l) {
    ps.push_back(weights[l]);
    ps.push_back(biases[l]);
  }
  ps.push_back(w_mean);
  ps.push_back(b_mean);
  ps.push_back(w_var);
  ps.push_back(b_var);
  return ps;
}

}  // namespace mgp
