#pragma once

#include <vector>

#include "mgp/svgp.hpp"

namespace mgp {

/// Relaxed one-hot expert assignments for a batch; rows sum to 1.
struct AssignmentSample {
  Tensor relaxed;  // |B| x T
};

/// Reparameterized Concrete draw: row i = softmax((logits_i + g_i) / temperature)
/// with standard Gumbel noise g; differentiable w.r.t. the logits.
AssignmentSample concrete_sample(const Tensor& logits, double temperature,
                                 RngState& rng);
AssignmentSample concrete_sample_with_noise(const Tensor& logits,
                                            double temperature,
                                            const Matrix& gumbel_noise);

/// Numerically stabilized log((1/S) sum exp(v_s)) over scalar tensors.
Tensor log_mean_exp(const std::vector<Tensor>& values);

/// Mixture of T expert GPs with T assignment GPs; trained by the
/// marginalized bound log E_{p(W|A)}[exp(partial bound)] estimated with
/// Concrete relaxation.
class SmgpModel {
 public:
  std::vector<InducingBlock> expert_blocks;
  std::vector<InducingBlock> assign_blocks;
  std::vector<Tensor> log_noise;  // per-expert noise variance, log-space
  double temperature = 0.01;
  int mc_samples = 10;

  static SmgpModel create(int n_experts, int input_dim,
                          const Matrix& inducing_inputs,
                          double lengthscale = 1.0, double signal_variance = 1.0,
                          double noise_variance = 1.0);

  int n_experts() const { return static_cast<int>(expert_blocks.size()); }
  Tensor noise_variance(int t) const { return exp(log_noise[t]); }

  /// Analytic expected log-likelihood under q(F) with relaxed indicators as
  /// weights, scaled by n_total/batch.
  Tensor partial_bound(const AssignmentSample& w, const Matrix& x,
                       const Vector& y, long n_total) const;

  /// Frozen stochasticity of one ELBO evaluation: one reparameterized draw
  /// per assignment GP, mc_samples Gumbel matrices.
  struct Noise {
    std::vector<Matrix> assign_eps;  // T entries, |B| x 1
    std::vector<Matrix> gumbels;     // mc_samples entries, |B| x T
  };
  Noise draw_noise(Index batch_size, RngState& rng) const;

  struct ElboDetail {
    Tensor elbo;
    std::vector<double> partials;  // per-Concrete-sample partial bounds
    double kl_sum = 0.0;           // all 2T block KL terms
  };
  ElboDetail elbo_with_noise(const Matrix& x, const Vector& y, long n_total,
                             const Noise& noise) const;
  Tensor elbo(const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const;

  /// Per test point: draw assignment logits from q(A), hard multinomial
  /// expert choice, then y from that expert with its noise.
  Matrix predict_samples(const Matrix& x_star, int samples_per_point,
                         RngState& rng) const;

  struct ExpertMarginals {
    Matrix f_mean, f_var;  // n x T
    Matrix a_mean, a_var;  // n x T
  };
  ExpertMarginals predict_marginals(const Matrix& x_star) const;
};

}  // namespace mgp
