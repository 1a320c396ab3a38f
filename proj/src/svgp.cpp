#include "mgp/svgp.hpp"

#include <cmath>

namespace mgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kVarFloor = 1e-12;
}  // namespace

NoiseParam NoiseParam::create(double variance, double floor) {
  NoiseParam n;
  if (variance <= floor) throw Error("NoiseParam: variance must exceed floor");
  n.log_variance = Tensor::parameter(std::log(variance - floor));
  n.floor = floor;
  return n;
}

Tensor NoiseParam::variance() const {
  Tensor v = exp(log_variance);
  return floor > 0.0 ? v + floor : v;
}

InducingBlock InducingBlock::create(SeArdKernel kernel, Matrix inducing_inputs,
                                    bool learn_prior_mean) {
  InducingBlock b;
  if (inducing_inputs.cols() != kernel.input_dim) {
    throw DimensionMismatch("InducingBlock: Z vs kernel dim");
  }
  const Index m = inducing_inputs.rows();
  b.kernel = std::move(kernel);
  b.z = Tensor::parameter(std::move(inducing_inputs));
  b.m = Tensor::parameter(Matrix(Matrix::Zero(m, 1)));

  // Start S at (0.1 K_MM^{1/2})(0.1 K_MM^{1/2})^T: moderate initial KL.
  Tensor kmm = b.kernel.gram(b.z, b.z);
  double sv = b.kernel.signal_variance().scalar();
  CholeskyFactor f =
      cholesky_with_jitter(detach(kmm), b.jitter_rel * sv, b.jitter_cap_rel * sv);
  Matrix l0 = 0.1 * f.lower.value();
  Matrix raw = l0.triangularView<Eigen::StrictlyLower>();
  raw.diagonal() = l0.diagonal().array().log();
  b.s_raw = Tensor::parameter(raw);

  b.prior_mean = learn_prior_mean ? Tensor::parameter(0.0) : Tensor::constant(0.0);
  b.learn_prior_mean = learn_prior_mean;
  return b;
}

Tensor InducingBlock::s_factor() const {
  return lower_triangular(s_raw, /*strict=*/true) +
         diag_embed(exp(diag_part(s_raw)));
}

InducingBlock::Prep InducingBlock::prep() const {
  Tensor kmm = kernel.gram(z, z);
  double sv = kernel.signal_variance().scalar();
  CholeskyFactor f =
      cholesky_with_jitter(kmm, jitter_rel * sv, jitter_cap_rel * sv);
  return Prep{f.lower, s_factor(), f.jitter_used};
}

GaussianMarginals InducingBlock::marginals(const Prep& p, const Tensor& x,
                                           bool want_full) const {
  if (x.cols() != kernel.input_dim) {
    throw DimensionMismatch("marginals: input dim mismatch");
  }
  Tensor kmn = kernel.gram(z, x);                 // M x n
  Tensor a = tri_solve(p.l_kmm, kmn, false);      // L^-1 K_MN
  Tensor centered = sub(m, prior_mean);           // m - mu0
  Tensor mean =
      add(matmul(transpose(a), tri_solve(p.l_kmm, centered, false)), prior_mean);

  Tensor b = tri_solve(p.l_kmm, a, true);         // K_MM^-1 K_MN
  Tensor c = matmul(transpose(p.l_s), b);         // L_S^T K_MM^-1 K_MN

  GaussianMarginals out;
  out.mean = mean;
  Tensor var = kernel.gram_diag(x) - transpose(colsum(square(a))) +
               transpose(colsum(square(c)));
  out.var = clamp_min(var, kVarFloor);
  if (want_full) {
    out.cov = kernel.gram(x, x) - matmul(transpose(a), a) +
              matmul(transpose(c), c);
  }
  return out;
}

GaussianMarginals InducingBlock::marginals(const Tensor& x, bool want_full) const {
  return marginals(prep(), x, want_full);
}

Tensor InducingBlock::kl_to_prior(const Prep& p) const {
  const double mm = static_cast<double>(num_inducing());
  Tensor trace_term = sum(square(tri_solve(p.l_kmm, p.l_s, false)));
  Tensor dm = sub(m, prior_mean);
  Tensor quad = sum(square(tri_solve(p.l_kmm, dm, false)));
  Tensor logdet_k = sum(log(diag_part(p.l_kmm))) * 2.0;
  Tensor logdet_s = sum(log(diag_part(p.l_s))) * 2.0;
  return (trace_term + quad - mm + logdet_k - logdet_s) * 0.5;
}

Tensor InducingBlock::kl_to_prior() const { return kl_to_prior(prep()); }

Tensor expected_gaussian_loglik(const GaussianMarginals& marg,
                                const Tensor& noise_variance, const Matrix& y,
                                long n_total) {
  const Index b = y.rows();
  if (marg.mean.rows() != b) throw DimensionMismatch("expected_gaussian_loglik");
  const double scale = static_cast<double>(n_total) / static_cast<double>(b);
  Tensor yb = Tensor::constant(y);
  Tensor inv_noise = div(Tensor::constant(1.0), noise_variance);
  Tensor resid = sum(square(sub(yb, marg.mean)));
  Tensor smear = sum(marg.var);
  Tensor fit = mul(add(resid, smear), inv_noise) * 0.5;
  Tensor norm =
      (log(noise_variance) + kLog2Pi) * (0.5 * static_cast<double>(b));
  return (neg(add(fit, norm))) * scale;
}

SvgpModel SvgpModel::create(SeArdKernel kernel, Matrix inducing_inputs,
                            double noise_variance) {
  SvgpModel m;
  m.block = InducingBlock::create(std::move(kernel), std::move(inducing_inputs));
  m.noise = NoiseParam::create(noise_variance);
  return m;
}

Tensor SvgpModel::elbo(const Matrix& x, const Vector& y, long n_total) const {
  if (x.rows() == 0) throw Error("svgp elbo: empty batch");
  if (n_total < x.rows()) throw Error("svgp elbo: n_total < batch size");
  InducingBlock::Prep p = block.prep();
  GaussianMarginals marg = block.marginals(p, Tensor::constant(x));
  Tensor ell = expected_gaussian_loglik(marg, noise.variance(), y, n_total);
  return sub(ell, block.kl_to_prior(p));
}

GaussianMarginals SvgpModel::predict(const Matrix& x_star) const {
  GaussianMarginals marg = block.marginals(Tensor::constant(x_star));
  marg.var = add(marg.var, noise.variance());
  return marg;
}

Matrix SvgpModel::predict_samples(const Matrix& x_star, int samples_per_point,
                                  RngState& rng) const {
  GaussianMarginals marg = predict(x_star);
  const Index n = x_star.rows();
  Matrix out(n, samples_per_point);
  const Matrix& mu = marg.mean.value();
  Matrix sd = marg.var.value().array().sqrt();
  for (Index i = 0; i < n; ++i)
    for (int s = 0; s < samples_per_point; ++s)
      out(i, s) = mu(i, 0) + sd(i, 0) * rng.normal();
  return out;
}

}  // namespace mgp
