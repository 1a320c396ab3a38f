#include "mgp/smgp.hpp"

#include <cmath>

namespace mgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

AssignmentSample concrete_sample_with_noise(const Tensor& logits,
                                            double temperature,
                                            const Matrix& gumbel_noise) {
  if (temperature <= 0.0) throw Error("concrete_sample: temperature must be > 0");
  if (gumbel_noise.rows() != logits.rows() || gumbel_noise.cols() != logits.cols()) {
    throw DimensionMismatch("concrete_sample: noise shape");
  }
  Tensor u = add(logits, Tensor::constant(gumbel_noise));
  // Rowwise max is a shift; softmax is shift-invariant, so detaching it
  // keeps gradients exact while bounding the exponentials by 1.
  Tensor row_max = Tensor::constant(Matrix(u.value().rowwise().maxCoeff()));
  Tensor shifted = add_colvec(u, neg(row_max)) * (1.0 / temperature);
  Tensor e = exp(shifted);
  Tensor denom = rowsum(e);
  return AssignmentSample{mul_colvec(e, div(Tensor::constant(1.0), denom))};
}

AssignmentSample concrete_sample(const Tensor& logits, double temperature,
                                 RngState& rng) {
  return concrete_sample_with_noise(logits, temperature,
                                    rng.gumbel_matrix(logits.rows(), logits.cols()));
}

Tensor log_mean_exp(const std::vector<Tensor>& values) {
  if (values.empty()) throw Error("log_mean_exp: no values");
  double mx = -1e300;
  for (const auto& v : values) mx = std::max(mx, v.scalar());
  Tensor acc = exp(values[0] - mx);
  for (size_t s = 1; s < values.size(); ++s) acc = acc + exp(values[s] - mx);
  return log(acc * (1.0 / static_cast<double>(values.size()))) + mx;
}

SmgpModel SmgpModel::create(int n_experts, int input_dim,
                            const Matrix& inducing_inputs, double lengthscale,
                            double signal_variance, double noise_variance) {
  if (n_experts < 1) throw Error("SmgpModel: need at least one expert");
  SmgpModel m;
  for (int t = 0; t < n_experts; ++t) {
    m.expert_blocks.push_back(InducingBlock::create(
        SeArdKernel::create(input_dim, lengthscale, signal_variance),
        inducing_inputs));
    m.assign_blocks.push_back(InducingBlock::create(
        SeArdKernel::create(input_dim, lengthscale, signal_variance),
        inducing_inputs));
    m.log_noise.push_back(Tensor::parameter(std::log(noise_variance)));
  }
  return m;
}

namespace {

// Per-point expected Gaussian log-density of one expert:
// log N(y_i | mu_i, nu_t) - var_i / (2 nu_t), as a |B| x 1 tensor.
Tensor expert_loglik_vector(const GaussianMarginals& marg, const Tensor& nu,
                            const Tensor& y) {
  Tensor inv = div(Tensor::constant(1.0), nu);
  Tensor quad = square(sub(y, marg.mean)) + marg.var;
  return (log(nu) + kLog2Pi) * -0.5 - mul(quad, inv) * 0.5;
}

}  // namespace

Tensor SmgpModel::partial_bound(const AssignmentSample& w, const Matrix& x,
                                const Vector& y, long n_total) const {
  const Index b = x.rows();
  if (w.relaxed.rows() != b || w.relaxed.cols() != n_experts()) {
    throw DimensionMismatch("partial_bound: W shape");
  }
  const double scale = static_cast<double>(n_total) / static_cast<double>(b);
  Tensor xb = Tensor::constant(x);
  Tensor yt = Tensor::constant(Matrix(y));
  Tensor acc;
  for (int t = 0; t < n_experts(); ++t) {
    GaussianMarginals marg = expert_blocks[t].marginals(xb);
    Tensor g = expert_loglik_vector(marg, noise_variance(t), yt);
    Tensor term = sum(mul(cols(w.relaxed, t, 1), g));
    acc = (t == 0) ? term : add(acc, term);
  }
  return acc * scale;
}

SmgpModel::Noise SmgpModel::draw_noise(Index batch_size, RngState& rng) const {
  Noise n;
  for (int t = 0; t < n_experts(); ++t) {
    n.assign_eps.push_back(rng.std_normal_matrix(batch_size, 1));
  }
  for (int s = 0; s < mc_samples; ++s) {
    n.gumbels.push_back(rng.gumbel_matrix(batch_size, n_experts()));
  }
  return n;
}

SmgpModel::ElboDetail SmgpModel::elbo_with_noise(const Matrix& x,
                                                 const Vector& y, long n_total,
                                                 const Noise& noise) const {
  const Index b = x.rows();
  if (b == 0) throw Error("smgp elbo: empty batch");
  if (static_cast<int>(noise.gumbels.size()) != mc_samples ||
      static_cast<int>(noise.assign_eps.size()) != n_experts()) {
    throw DimensionMismatch("smgp elbo: noise layout");
  }
  const double scale = static_cast<double>(n_total) / static_cast<double>(b);
  Tensor xb = Tensor::constant(x);
  Tensor yt = Tensor::constant(Matrix(y));

  // Expert marginals and KL terms once per evaluation.
  std::vector<Tensor> expert_ll;
  Tensor kl;
  for (int t = 0; t < n_experts(); ++t) {
    InducingBlock::Prep pf = expert_blocks[t].prep();
    GaussianMarginals marg = expert_blocks[t].marginals(pf, xb);
    expert_ll.push_back(expert_loglik_vector(marg, noise_variance(t), yt));
    Tensor kt = expert_blocks[t].kl_to_prior(pf);
    kl = (t == 0) ? kt : add(kl, kt);
  }

  // One reparameterized draw of the assignment logits.
  std::vector<Tensor> logit_cols;
  for (int t = 0; t < n_experts(); ++t) {
    InducingBlock::Prep pa = assign_blocks[t].prep();
    GaussianMarginals marg = assign_blocks[t].marginals(pa, xb);
    Tensor a = add(marg.mean,
                   mul(sqrt(marg.var), Tensor::constant(noise.assign_eps[t])));
    logit_cols.push_back(a);
    kl = add(kl, assign_blocks[t].kl_to_prior(pa));
  }
  Tensor logits = hstack(logit_cols);

  std::vector<Tensor> partials;
  partials.reserve(mc_samples);
  for (int s = 0; s < mc_samples; ++s) {
    AssignmentSample w =
        concrete_sample_with_noise(logits, temperature, noise.gumbels[s]);
    Tensor acc;
    for (int t = 0; t < n_experts(); ++t) {
      Tensor term = sum(mul(cols(w.relaxed, t, 1), expert_ll[t]));
      acc = (t == 0) ? term : add(acc, term);
    }
    partials.push_back(acc * scale);
  }

  ElboDetail out;
  out.elbo = sub(log_mean_exp(partials), kl);
  for (const auto& p : partials) out.partials.push_back(p.scalar());
  out.kl_sum = kl.scalar();
  return out;
}

Tensor SmgpModel::elbo(const Matrix& x, const Vector& y, long n_total,
                       RngState& rng) const {
  return elbo_with_noise(x, y, n_total, draw_noise(x.rows(), rng)).elbo;
}

SmgpModel::ExpertMarginals SmgpModel::predict_marginals(const Matrix& x_star) const {
  ExpertMarginals out;
  const Index n = x_star.rows();
  const int t_count = n_experts();
  out.f_mean.resize(n, t_count);
  out.f_var.resize(n, t_count);
  out.a_mean.resize(n, t_count);
  out.a_var.resize(n, t_count);
  Tensor xs = Tensor::constant(x_star);
  for (int t = 0; t < t_count; ++t) {
    GaussianMarginals mf = expert_blocks[t].marginals(xs);
    GaussianMarginals ma = assign_blocks[t].marginals(xs);
    out.f_mean.col(t) = mf.mean.value().col(0);
    out.f_var.col(t) = mf.var.value().col(0);
    out.a_mean.col(t) = ma.mean.value().col(0);
    out.a_var.col(t) = ma.var.value().col(0);
  }
  return out;
}

Matrix SmgpModel::predict_samples(const Matrix& x_star, int samples_per_point,
                                  RngState& rng) const {
  if (samples_per_point < 1) throw Error("smgp predict: samples_per_point >= 1");
  ExpertMarginals m = predict_marginals(x_star);
  const Index n = x_star.rows();
  const int t_count = n_experts();
  Vector noise_sd(t_count);
  for (int t = 0; t < t_count; ++t)
    noise_sd(t) = std::sqrt(noise_variance(t).scalar());

  Matrix out(n, samples_per_point);
  Vector weights(t_count);
  for (Index i = 0; i < n; ++i) {
    for (int s = 0; s < samples_per_point; ++s) {
      double amax = -1e300;
      for (int t = 0; t < t_count; ++t) {
        double a = m.a_mean(i, t) + std::sqrt(m.a_var(i, t)) * rng.normal();
        weights(t) = a;
        amax = std::max(amax, a);
      }
      for (int t = 0; t < t_count; ++t)
        weights(t) = std::exp(weights(t) - amax);
      int pick = rng.categorical(weights);
      double f = m.f_mean(i, pick) + std::sqrt(m.f_var(i, pick)) * rng.normal();
      out(i, s) = f + noise_sd(pick) * rng.normal();
    }
  }
  return out;
}

}  // namespace mgp
