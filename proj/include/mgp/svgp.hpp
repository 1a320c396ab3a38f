#pragma once

#include <optional>

#include "mgp/kernel.hpp"
#include "mgp/rng.hpp"
#include "mgp/tensor.hpp"

namespace mgp {

/// Marginals of q(f) at a set of inputs: mean, per-point variance, and
/// optionally the full covariance.
struct GaussianMarginals {
  Tensor mean;  // n x 1
  Tensor var;   // n x 1, strictly positive
  std::optional<Tensor> cov;
};

/// Homoscedastic observation noise, stored as log variance.
struct NoiseParam {
  Tensor log_variance;
  // Lower bound added to exp(log_variance); keeps the variance usable even
  // when training collapses it (observed for the latent-input model).
  double floor = 0.0;

  static NoiseParam create(double variance, double floor = 0.0);
  Tensor variance() const;
  double value() const { return variance().scalar(); }
};

/// Inducing inputs Z with variational Gaussian q(u) = N(m, S), S kept as a
/// Cholesky factor with log-diagonal storage. prior_mean is the constant
/// prior mean (the log-modulator GP learns it; everywhere else it is 0).
class InducingBlock {
 public:
  SeArdKernel kernel;
  Tensor z;           // M x d
  Tensor m;           // M x 1
  Tensor s_raw;       // M x M unconstrained; see s_factor()
  Tensor prior_mean;  // 1 x 1
  bool learn_prior_mean = false;
  double jitter_rel = 1e-6;
  double jitter_cap_rel = 1e-2;

  static InducingBlock create(SeArdKernel kernel, Matrix inducing_inputs,
                              bool learn_prior_mean = false);

  Index num_inducing() const { return z.rows(); }
  int input_dim() const { return kernel.input_dim; }

  /// S = L Lᵀ with L = strictlower(s_raw) + diag(exp(diag(s_raw))).
  Tensor s_factor() const;

  /// Quantities shared by marginals and the KL within one tape: the
  /// jittered K_MM factor and the S factor. Jitter is scaled by the
  /// kernel signal variance.
  struct Prep {
    Tensor l_kmm;
    Tensor l_s;
    double jitter_used = 0.0;
  };
  Prep prep() const;

  GaussianMarginals marginals(const Prep& p, const Tensor& x,
                              bool want_full = false) const;
  GaussianMarginals marginals(const Tensor& x, bool want_full = false) const;

  /// KL(N(m,S) || N(prior_mean*1, K_MM)) in closed form.
  Tensor kl_to_prior(const Prep& p) const;
  Tensor kl_to_prior() const;
};

/// Analytic expected Gaussian log-likelihood
///   sum_i E_q(f_i)[log N(y_i | f_i, noise)] =
///   sum_i [ log N(y_i | mu_i, noise) - var_i / (2 noise) ],
/// scaled by n_total / batch_size.
Tensor expected_gaussian_loglik(const GaussianMarginals& marg,
                                const Tensor& noise_variance, const Matrix& y,
                                long n_total);

/// Baseline sparse variational GP regression model.
class SvgpModel {
 public:
  InducingBlock block;
  NoiseParam noise;

  static SvgpModel create(SeArdKernel kernel, Matrix inducing_inputs,
                          double noise_variance = 1.0);

  Tensor elbo(const Matrix& x, const Vector& y, long n_total) const;

  /// Marginals of p(y*|y): q(f) at x_star with noise variance added.
  GaussianMarginals predict(const Matrix& x_star) const;

  Matrix predict_samples(const Matrix& x_star, int samples_per_point,
                         RngState& rng) const;
};

}  // namespace mgp
