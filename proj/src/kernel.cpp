#include "mgp/kernel.hpp"

#include <cmath>

namespace mgp {

SeArdKernel SeArdKernel::create(int input_dim, double lengthscale,
                                double signal_variance) {
  SeArdKernel k;
  k.input_dim = input_dim;
  k.log_lengthscales = Tensor::parameter(
      Matrix(Matrix::Constant(input_dim, 1, std::log(lengthscale))));
  k.log_signal_variance = Tensor::parameter(std::log(signal_variance));
  return k;
}

Tensor SeArdKernel::gram(const Tensor& a, const Tensor& b) const {
  if (a.cols() != input_dim || b.cols() != input_dim) {
    throw DimensionMismatch("SeArdKernel::gram: input dim mismatch");
  }
  Tensor inv_ls = transpose(exp(neg(log_lengthscales)));  // 1 x d
  Tensor as = mul_rowvec(a, inv_ls);
  Tensor bs = mul_rowvec(b, inv_ls);
  Tensor sq_a = rowsum(square(as));             // n x 1
  Tensor sq_b = transpose(rowsum(square(bs)));  // 1 x m
  Tensor cross = matmul(as, transpose(bs));     // n x m
  Tensor d2 = add_rowvec(add_colvec(cross * -2.0, sq_a), sq_b);
  return mul(exp(d2 * -0.5), signal_variance());
}

Tensor SeArdKernel::gram_diag(const Tensor& a) const {
  if (a.cols() != input_dim) {
    throw DimensionMismatch("SeArdKernel::gram_diag: input dim mismatch");
  }
  Tensor ones = Tensor::constant(Matrix(Matrix::Ones(a.rows(), 1)));
  return mul(ones, signal_variance());
}

}  // namespace mgp
