#include "mgp/slgp.hpp"

#include <cmath>

#include "mgp/smgp.hpp"  // log_mean_exp

namespace mgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

// Batch sum of log N(value | mean, var), all matrices n x d.
Tensor gaussian_logdensity_sum(const Tensor& value, const Tensor& mean,
                               const Tensor& var) {
  Tensor quad = div(square(sub(value, mean)), var);
  return sum(add(add(log(var), quad), kLog2Pi)) * -0.5;
}
}  // namespace

SlgpModel SlgpModel::create(int d_x, int d_w, int d_h,
                            const Matrix& inducing_inputs,
                            const std::vector<int>& hidden, double beta,
                            int s_iw, RngState& rng, double noise_variance,
                            double nu0, double noise_floor) {
  if (d_h < d_x + d_w) {
    throw UnsupportedDimension("SlgpModel: d_h must be >= d_x + d_w");
  }
  if (s_iw < 1) throw Error("SlgpModel: s_iw must be >= 1");
  if (beta < 0.0 || beta > 1.0) throw Error("SlgpModel: beta must be in [0,1]");
  SlgpModel m;
  m.d_x = d_x;
  m.d_w = d_w;
  m.d_h = d_h;
  m.beta = beta;
  m.s_iw = s_iw;
  m.gp_block =
      InducingBlock::create(SeArdKernel::create(d_h), inducing_inputs);
  m.noise = NoiseParam::create(noise_variance, noise_floor);
  m.prior_net = MlpFunction::create(d_x, hidden, d_w, rng);
  m.post_net = MlpFunction::create(d_x + 1, hidden, d_w, rng);
  m.enc_net = MlpFunction::create(d_x + d_w, hidden, d_h, rng);
  m.log_nu0 = Tensor::parameter(std::log(nu0));
  return m;
}

Matrix SlgpModel::phi_matrix(const Matrix& x, const Matrix& w, int d_h) {
  const Index pad = d_h - x.cols() - w.cols();
  if (pad < 0) {
    throw UnsupportedDimension("phi: d_h < d_x + d_w is out of scope");
  }
  Matrix out(x.rows(), d_h);
  out.leftCols(x.cols()) = x;
  out.middleCols(x.cols(), w.cols()) = w;
  if (pad > 0) out.rightCols(pad).setZero();
  return out;
}

Tensor SlgpModel::phi(const Tensor& x, const Tensor& w) const {
  const Index pad = d_h - x.cols() - w.cols();
  if (pad < 0) {
    throw UnsupportedDimension("phi: d_h < d_x + d_w is out of scope");
  }
  std::vector<Tensor> parts = {x, w};
  if (pad > 0) {
    parts.push_back(Tensor::constant(Matrix(Matrix::Zero(x.rows(), pad))));
  }
  return hstack(parts);
}

SlgpModel::Noise SlgpModel::draw_noise(Index batch_size, RngState& rng) const {
  Noise n;
  for (int s = 0; s < s_iw; ++s) {
    n.w_eps.push_back(rng.std_normal_matrix(batch_size, d_w));
    n.h_eps.push_back(rng.std_normal_matrix(batch_size, d_h));
  }
  return n;
}

Tensor SlgpModel::partial_bound(const Matrix& x, const Vector& y, long n_total,
                                const Tensor& h_draw) const {
  if (h_draw.rows() != x.rows()) throw DimensionMismatch("partial_bound");
  GaussianMarginals marg = gp_block.marginals(h_draw);
  return expected_gaussian_loglik(marg, noise.variance(), y, n_total);
}

SlgpModel::Latents SlgpModel::latents(const Matrix& x, const Vector& y,
                                      long n_total, const Noise& nz) const {
  const Index b = x.rows();
  if (b == 0) throw Error("slgp: empty batch");
  if (static_cast<int>(nz.w_eps.size()) != s_iw) {
    throw DimensionMismatch("slgp: noise layout");
  }
  Latents out;
  out.scale = static_cast<double>(n_total) / static_cast<double>(b);

  Tensor xc = Tensor::constant(x);
  Tensor yc = Tensor::constant(Matrix(y));
  Tensor xy = hstack({xc, yc});

  auto [mq, vq] = post_net.gaussian_head(xy, MlpFunction::Positivity::kSoftplus);
  auto [mp, vp] = prior_net.gaussian_head(xc, MlpFunction::Positivity::kSoftplus);

  // Closed-form KL[q(w)||p(w)] per point, summed over the batch.
  Tensor ratio = div(vq, vp);
  Tensor klw = add(ratio, div(square(sub(mq, mp)), vp));
  klw = add(sub(klw, log(ratio)), -1.0);
  out.kl_w = sum(klw) * 0.5;

  InducingBlock::Prep prep = gp_block.prep();
  out.kl_u = gp_block.kl_to_prior(prep);

  Tensor nu0_t = nu0();
  Tensor inv_nu0 = div(Tensor::constant(1.0), nu0_t);
  Tensor noise_var = noise.variance();

  for (int s = 0; s < s_iw; ++s) {
    DrawLedger d;
    Tensor w = add(mq, mul(sqrt(vq), Tensor::constant(nz.w_eps[s])));
    d.log_q_w = gaussian_logdensity_sum(w, mq, vq);
    d.log_p_w = gaussian_logdensity_sum(w, mp, vp);

    Tensor xw = hstack({xc, w});
    auto [mh, vh] =
        enc_net.gaussian_head(xw, MlpFunction::Positivity::kScaledSigmoid, nu0_t);
    Tensor h = add(mh, mul(sqrt(vh), Tensor::constant(nz.h_eps[s])));
    Tensor center = phi(xc, w);

    d.log_q_h = gaussian_logdensity_sum(h, mh, vh);
    Tensor quad_p = mul(square(sub(h, center)), inv_nu0);
    d.log_p_h = sum(add(add(log(nu0_t), quad_p), kLog2Pi)) * -0.5;

    Tensor klh = add(mul(vh, inv_nu0), mul(square(sub(mh, center)), inv_nu0));
    klh = add(sub(add(klh, log(nu0_t)), log(vh)), -1.0);
    d.kl_h = sum(klh) * 0.5;

    GaussianMarginals marg = gp_block.marginals(prep, h);
    d.partial = expected_gaussian_loglik(marg, noise_var, y, n_total);
    out.draws.push_back(std::move(d));
  }
  return out;
}

Tensor SlgpModel::elbo_with_noise(Bound bound, const Matrix& x, const Vector& y,
                                  long n_total, const Noise& nz) const {
  Latents lat = latents(x, y, n_total, nz);
  const double s_inv = 1.0 / static_cast<double>(s_iw);

  if (bound == Bound::kVi) {
    Tensor ell, klh;
    for (int s = 0; s < s_iw; ++s) {
      const DrawLedger& d = lat.draws[s];
      ell = (s == 0) ? d.partial : add(ell, d.partial);
      klh = (s == 0) ? d.kl_h : add(klh, d.kl_h);
    }
    Tensor bound_val = sub(ell * s_inv, klh * (s_inv * beta * lat.scale));
    return sub(sub(bound_val, lat.kl_w * lat.scale), lat.kl_u);
  }

  std::vector<Tensor> exponents;
  exponents.reserve(s_iw);
  for (int s = 0; s < s_iw; ++s) {
    const DrawLedger& d = lat.draws[s];
    Tensor ratio = sub(d.log_p_w, d.log_q_w);
    if (bound == Bound::kIwvi) {
      ratio = add(ratio, sub(d.log_p_h, d.log_q_h) * beta);
    }
    exponents.push_back(add(d.partial, ratio * lat.scale));
  }
  Tensor lme = log_mean_exp(exponents);
  if (bound == Bound::kHybrid) {
    Tensor klh;
    for (int s = 0; s < s_iw; ++s) {
      klh = (s == 0) ? lat.draws[s].kl_h : add(klh, lat.draws[s].kl_h);
    }
    lme = sub(lme, klh * (s_inv * beta * lat.scale));
  }
  return sub(lme, lat.kl_u);
}

Tensor SlgpModel::elbo(Bound bound, const Matrix& x, const Vector& y,
                       long n_total, RngState& rng) const {
  return elbo_with_noise(bound, x, y, n_total, draw_noise(x.rows(), rng));
}

SlgpModel::Prediction SlgpModel::predict(const Matrix& x_star,
                                         int samples_per_point,
                                         RngState& rng) const {
  if (samples_per_point < 1) throw Error("slgp predict: samples_per_point >= 1");
  const Index n = x_star.rows();
  Tensor xc = Tensor::constant(x_star);
  auto [mp, vp] = prior_net.gaussian_head(xc, MlpFunction::Positivity::kSoftplus);
  const Matrix prior_mean = mp.value();
  const Matrix prior_sd = vp.value().array().sqrt();
  const double nu0_v = nu0().scalar();
  const double noise_sd = std::sqrt(noise.value());

  InducingBlock::Prep prep = gp_block.prep();
  Prediction out;
  out.y_samples.resize(n, samples_per_point);
  out.f_samples.resize(n, samples_per_point);
  for (int s = 0; s < samples_per_point; ++s) {
    Matrix w = prior_mean + prior_sd.cwiseProduct(rng.std_normal_matrix(n, d_w));
    Matrix h = phi_matrix(x_star, w, d_h) +
               std::sqrt(nu0_v) * rng.std_normal_matrix(n, d_h);
    GaussianMarginals marg = gp_block.marginals(prep, Tensor::constant(h));
    for (Index i = 0; i < n; ++i) {
      double f = marg.mean.value()(i, 0) +
                 std::sqrt(marg.var.value()(i, 0)) * rng.normal();
      out.f_samples(i, s) = f;
      out.y_samples(i, s) = f + noise_sd * rng.normal();
    }
  }
  return out;
}

}  // namespace mgp
