#pragma once

#include "mgp/gauss_hermite.hpp"
#include "mgp/svgp.hpp"

namespace mgp {

/// Per-test-point Gaussian mixture produced by Gauss-Hermite integration
/// over the log-modulator; weights are normalized.
struct GhMixture {
  Matrix means;    // n x K
  Matrix vars;     // n x K
  Vector weights;  // K

  double pdf(Index point, double y) const;
  double cdf(Index point, double y) const;
};

/// Heteroscedastic GP: y = e^{w(x)} f(x) + eps(x) with
/// eps(x) ~ N(0, c e^{2w(x)}), both f and the log-modulator w sparse GPs.
class ShgpModel {
 public:
  InducingBlock f_block;  // prior mean 0
  InducingBlock w_block;  // learned constant prior mean mu0_w
  Tensor log_c;

  static ShgpModel create(SeArdKernel f_kernel, SeArdKernel w_kernel,
                          Matrix inducing_inputs, double c = 1.0);

  Tensor c() const { return exp(log_c); }

  /// Analytic E_{q(w)q(f)}[log p(y|f,w)], scaled by n_total/batch.
  Tensor expected_loglik(const Matrix& x, const Vector& y, long n_total) const;

  Tensor elbo(const Matrix& x, const Vector& y, long n_total) const;

  struct Prediction {
    Matrix y_samples;          // n x samples_per_point
    Vector mean, var;          // analytic predictive moments
    Vector f_mean, f_var;      // q(f*) marginals
    Vector w_mean, w_var;      // q(w*) marginals
    GhMixture density;         // gh_points-component mixture
  };

  Prediction predict(const Matrix& x_star, int gh_points,
                     int samples_per_point, RngState& rng) const;
};

}  // namespace mgp
