#pragma once

#include <vector>

#include "mgp/mlp.hpp"
#include "mgp/svgp.hpp"

namespace mgp {

/// Latent-input GP: y = f([x,w]) + eps with amortized prior p(w|x) and
/// posterior q(w|x,y), plus a regularized stochastic encoder q(h|w) mapping
/// the augmented inputs into the space the GP lives on. Trained with the
/// VI, IWVI or hybrid bound.
class SlgpModel {
 public:
  enum class Bound { kHybrid, kIwvi, kVi };

  InducingBlock gp_block;  // over R^{d_h}
  NoiseParam noise;        // floored; training tends to collapse it
  MlpFunction prior_net;   // x -> d_w heads
  MlpFunction post_net;    // [x,y] -> d_w heads
  MlpFunction enc_net;     // [x,w] -> d_h heads
  Tensor log_nu0;          // shared encoder variance scale
  int d_x = 0, d_w = 1, d_h = 0;
  double beta = 1.0;
  int s_iw = 10;

  static SlgpModel create(int d_x, int d_w, int d_h,
                          const Matrix& inducing_inputs,
                          const std::vector<int>& hidden, double beta,
                          int s_iw, RngState& rng, double noise_variance = 1.0,
                          double nu0 = 0.01, double noise_floor = 1e-6);

  Tensor nu0() const { return exp(log_nu0); }

  /// Zero-padding map [x, w, 0...] onto R^{d_h}.
  static Matrix phi_matrix(const Matrix& x, const Matrix& w, int d_h);
  Tensor phi(const Tensor& x, const Tensor& w) const;

  /// Frozen reparameterization noise for one bound evaluation.
  struct Noise {
    std::vector<Matrix> w_eps;  // s_iw entries, |B| x d_w
    std::vector<Matrix> h_eps;  // s_iw entries, |B| x d_h
  };
  Noise draw_noise(Index batch_size, RngState& rng) const;

  /// Per-draw ledger of every bound ingredient; all terms are batch sums
  /// of per-point quantities, unscaled.
  struct DrawLedger {
    Tensor partial;  // N/|B|-scaled expected log-likelihood at the h draw
    Tensor log_p_w, log_q_w;
    Tensor log_p_h, log_q_h;
    Tensor kl_h;  // closed-form KL[q(h|w)||p(h|w)] summed over the batch
  };
  struct Latents {
    std::vector<DrawLedger> draws;
    Tensor kl_w;  // closed-form KL[q(w)||p(w)] summed over the batch
    Tensor kl_u;
    double scale = 1.0;
  };
  Latents latents(const Matrix& x, const Vector& y, long n_total,
                  const Noise& noise) const;

  /// N/|B|-scaled analytic Gaussian expected log-likelihood of the sparse
  /// GP evaluated at an encoder draw.
  Tensor partial_bound(const Matrix& x, const Vector& y, long n_total,
                       const Tensor& h_draw) const;

  Tensor elbo_with_noise(Bound bound, const Matrix& x, const Vector& y,
                         long n_total, const Noise& noise) const;
  Tensor elbo(Bound bound, const Matrix& x, const Vector& y, long n_total,
              RngState& rng) const;

  struct Prediction {
    Matrix y_samples;  // n x samples_per_point
    Matrix f_samples;  // n x samples_per_point
  };

  /// Prior-sampling prediction: w* ~ p(w|x*), h* ~ N(phi(x*,w*), nu0 I),
  /// f* ~ q(f|h*), y* = f* + N(0, noise).
  Prediction predict(const Matrix& x_star, int samples_per_point,
                     RngState& rng) const;
};

}  // namespace mgp
