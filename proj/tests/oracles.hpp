#pragma once

// Independent reference computations used by the unit and acceptance suites.
// Everything here is plain Eigen, deliberately separate from the tape-based
// implementation paths it checks.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mgp/rng.hpp"

namespace mgp::oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kLog2Pi = 1.8378770664093454836;

// SE-ARD kernel entry by direct summation.
inline double se_ard_entry(const VectorXd& a, const VectorXd& b,
                           const VectorXd& lengthscales, double signal_var) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    double d = (a(k) - b(k)) / lengthscales(k);
    acc += d * d;
  }
  return signal_var * std::exp(-0.5 * acc);
}

inline MatrixXd se_ard_gram(const MatrixXd& a, const MatrixXd& b,
                            const VectorXd& lengthscales, double signal_var) {
  MatrixXd g(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      g(i, j) = se_ard_entry(a.row(i), b.row(j), lengthscales, signal_var);
  return g;
}

inline double log_normal_pdf(double y, double mean, double var) {
  double d = y - mean;
  return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

// Exact dense log marginal likelihood log N(y | 0, K_NN + noise I).
inline double dense_log_marginal(const MatrixXd& knn, const VectorXd& y,
                                 double noise_var) {
  MatrixXd c = knn;
  c.diagonal().array() += noise_var;
  Eigen::LLT<MatrixXd> llt(c);
  VectorXd alpha = llt.solve(y);
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (y.dot(alpha) + logdet + y.size() * kLog2Pi);
}

// Exact full-GP predictive mean/variance of the noise-free latent at x*.
inline void dense_gp_predict(const MatrixXd& knn, const MatrixXd& ksn,
                             const VectorXd& kss_diag, const VectorXd& y,
                             double noise_var, VectorXd* mean, VectorXd* var) {
  MatrixXd c = knn;
  c.diagonal().array() += noise_var;
  Eigen::LLT<MatrixXd> llt(c);
  *mean = ksn * llt.solve(y);
  MatrixXd v = llt.matrixL().solve(ksn.transpose());
  *var = kss_diag - v.colwise().squaredNorm().transpose();
}

// Mean and standard error of a Monte Carlo sample.
struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

inline McEstimate mc_mean(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  v /= static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(v / static_cast<double>(xs.size()))};
}

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<size_t>(pos);
  size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline double pearson(const VectorXd& a, const VectorXd& b) {
  double ma = a.mean(), mb = b.mean();
  VectorXd da = a.array() - ma, db = b.array() - mb;
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

}  // namespace mgp::oracle
