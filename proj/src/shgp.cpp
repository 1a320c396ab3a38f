#include "mgp/shgp.hpp"

#include <cmath>

namespace mgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

double GhMixture::pdf(Index point, double y) const {
  double acc = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    double v = vars(point, k);
    double d = y - means(point, k);
    acc += weights(k) * std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * M_PI * v);
  }
  return acc;
}

double GhMixture::cdf(Index point, double y) const {
  double acc = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    double zscore = (y - means(point, k)) / std::sqrt(2.0 * vars(point, k));
    acc += weights(k) * 0.5 * (1.0 + std::erf(zscore));
  }
  return acc;
}

ShgpModel ShgpModel::create(SeArdKernel f_kernel, SeArdKernel w_kernel,
                            Matrix inducing_inputs, double c) {
  if (f_kernel.input_dim != w_kernel.input_dim) {
    throw DimensionMismatch("ShgpModel: kernel dims differ");
  }
  ShgpModel m;
  m.f_block = InducingBlock::create(std::move(f_kernel), inducing_inputs, false);
  m.w_block = InducingBlock::create(std::move(w_kernel), std::move(inducing_inputs),
                                    /*learn_prior_mean=*/true);
  m.log_c = Tensor::parameter(std::log(c));
  return m;
}

Tensor ShgpModel::expected_loglik(const Matrix& x, const Vector& y,
                                  long n_total) const {
  const Index b = x.rows();
  if (b == 0) throw Error("shgp: empty batch");
  const double scale = static_cast<double>(n_total) / static_cast<double>(b);

  Tensor xb = Tensor::constant(x);
  GaussianMarginals mf = f_block.marginals(xb);
  GaussianMarginals mw = w_block.marginals(xb);

  Tensor r1 = exp(mw.var * 2.0 - mw.mean * 2.0);
  Tensor r2 = exp(mw.var * 0.5 - mw.mean);
  Tensor yt = Tensor::constant(Matrix(y));
  Tensor y2 = Tensor::constant(Matrix(y.array().square().matrix()));

  Tensor inner = mul(r1, y2) - mul(yt, mul(r2, mf.mean)) * 2.0 +
                 square(mf.mean) + mf.var;
  Tensor inv_c = exp(neg(log_c));
  Tensor per_point = mw.mean * 2.0 + mul(inner, inv_c);
  Tensor norm = (log_c + kLog2Pi) * static_cast<double>(b);
  return (norm + sum(per_point)) * (-0.5 * scale);
}

Tensor ShgpModel::elbo(const Matrix& x, const Vector& y, long n_total) const {
  Tensor ell = expected_loglik(x, y, n_total);
  return ell - f_block.kl_to_prior() - w_block.kl_to_prior();
}

ShgpModel::Prediction ShgpModel::predict(const Matrix& x_star, int gh_points,
                                         int samples_per_point,
                                         RngState& rng) const {
  if (gh_points < 1) throw Error("shgp predict: gh_points must be >= 1");
  Tensor xs = Tensor::constant(x_star);
  GaussianMarginals mf = f_block.marginals(xs);
  GaussianMarginals mw = w_block.marginals(xs);

  Prediction out;
  const Index n = x_star.rows();
  out.f_mean = mf.mean.value().col(0);
  out.f_var = mf.var.value().col(0);
  out.w_mean = mw.mean.value().col(0);
  out.w_var = mw.var.value().col(0);

  const double cv = c().scalar();
  // E[y*] = mu_f E[e^w]; E[y*^2] = (nu_f + c + mu_f^2) E[e^{2w}].
  out.mean = (out.f_mean.array() *
              (out.w_mean.array() + 0.5 * out.w_var.array()).exp())
                 .matrix();
  Vector second = ((out.f_var.array() + cv + out.f_mean.array().square()) *
                   (2.0 * out.w_mean.array() + 2.0 * out.w_var.array()).exp())
                      .matrix();
  out.var = second - out.mean.array().square().matrix();

  auto [nodes, wts] = gauss_hermite(gh_points);
  out.density.means.resize(n, gh_points);
  out.density.vars.resize(n, gh_points);
  out.density.weights = wts / wts.sum();
  for (Index i = 0; i < n; ++i) {
    double sw = std::sqrt(2.0 * out.w_var(i));
    for (int k = 0; k < gh_points; ++k) {
      double w = out.w_mean(i) + sw * nodes(k);
      out.density.means(i, k) = out.f_mean(i) * std::exp(w);
      out.density.vars(i, k) = std::exp(2.0 * w) * (out.f_var(i) + cv);
    }
  }

  out.y_samples.resize(n, samples_per_point);
  for (Index i = 0; i < n; ++i) {
    double sdw = std::sqrt(out.w_var(i));
    for (int s = 0; s < samples_per_point; ++s) {
      double w = out.w_mean(i) + sdw * rng.normal();
      double mean = out.f_mean(i) * std::exp(w);
      double var = std::exp(2.0 * w) * (out.f_var(i) + cv);
      out.y_samples(i, s) = mean + std::sqrt(var) * rng.normal();
    }
  }
  return out;
}

}  // namespace mgp
